// common.cc

// Copyright 2026  The Geotag Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "geotag/common.h"

#include <atomic>
#include <iostream>
#include <mutex>

namespace geotag {

namespace {
std::atomic<int> verbosity{0};
std::mutex log_mutex;
}  // namespace

int Verbosity() { return verbosity.load(); }

void SetVerbosity(int level) { verbosity.store(level); }

void EmitLog(int level, const std::string &message) {
  if (level > verbosity.load()) return;
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << message << '\n';
}

}  // namespace geotag
