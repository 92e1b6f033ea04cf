// Copyright 2026 The sgcache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy of
// the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations under
// the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgc {

// Root of every error thrown by the library. Misses are values, not errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SGC_DEFINE_ERROR(Name, Base)  \
  class Name : public Base {          \
   public:                            \
    using Base::Base;                 \
  }

// flash device
SGC_DEFINE_ERROR(FlashError, Error);
SGC_DEFINE_ERROR(ZoneFull, FlashError);
SGC_DEFINE_ERROR(BadAddress, FlashError);
SGC_DEFINE_ERROR(UnwrittenPage, FlashError);
SGC_DEFINE_ERROR(DeviceFullDeadlock, FlashError);

// object model / engines
SGC_DEFINE_ERROR(BadKey, Error);
SGC_DEFINE_ERROR(MalformedSet, Error);
SGC_DEFINE_ERROR(ObjectTooLarge, Error);
SGC_DEFINE_ERROR(ImmutableFilter, Error);
SGC_DEFINE_ERROR(PoolExhausted, Error);

// analytic models
SGC_DEFINE_ERROR(BadParams, Error);

// workload / harness
SGC_DEFINE_ERROR(FileNotFound, Error);
SGC_DEFINE_ERROR(ConfigError, Error);

#undef SGC_DEFINE_ERROR

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sgc
