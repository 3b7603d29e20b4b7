// Copyright 2026 The qpca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>
#include <string>

#include "qpca/error.hpp"

namespace {

using qpca::Error;
using qpca::ErrorCode;

TEST(ErrorCodes, NamesAreStableAndDistinct) {
  EXPECT_EQ(qpca::to_string(ErrorCode::DegenerateSpectrum), "DEGENERATE_SPECTRUM");
  EXPECT_EQ(qpca::to_string(ErrorCode::WeakAnchor), "WEAK_ANCHOR");
  EXPECT_EQ(qpca::to_string(ErrorCode::VanishingSuccess), "VANISHING_SUCCESS");
  EXPECT_EQ(qpca::to_string(ErrorCode::ParseError), "PARSE_ERROR");
  std::set<std::string> names;
  std::set<int> statuses;
  for (int c = 0; c <= static_cast<int>(ErrorCode::IoError); ++c) {
    names.insert(std::string(qpca::to_string(static_cast<ErrorCode>(c))));
    statuses.insert(qpca::exit_status(static_cast<ErrorCode>(c)));
  }
  EXPECT_EQ(names.size(), static_cast<std::size_t>(ErrorCode::IoError) + 1);
  EXPECT_EQ(statuses.size(), names.size());
  EXPECT_EQ(statuses.count(0), 0u);
}

TEST(ErrorCodes, ErrorCarriesCode) {
  try {
    throw Error(ErrorCode::InvalidRotation, "C too large");
  } catch (const std::runtime_error& e) {
    const auto* q = dynamic_cast<const Error*>(&e);
    ASSERT_NE(q, nullptr);
    EXPECT_EQ(q->code(), ErrorCode::InvalidRotation);
    EXPECT_NE(std::string(e.what()).find("C too large"), std::string::npos);
  }
}

}  // namespace
