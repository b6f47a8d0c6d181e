// Copyright 2026 The facerank Authors.
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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace facerank {

enum class ErrorKind {
  data,           // non-finite values, malformed numbers
  missing_class,  // a class with zero samples
  shape,          // dimension mismatch, asymmetric matrix
  degenerate,     // undefined result (zero Gram matrix, constant vector)
  format,         // wrong magic/version/dtype, missing label column
  truncated,      // payload shorter than the header promises
  io,             // open/read/write failure
  manifest,       // schema violation
  duplicate_id,
  missing_file,
  range,          // value outside its documented range
  evaluation,     // too few models to correlate
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::uint64_t> offset = std::nullopt)
      : std::runtime_error(what), kind_(kind), offset_(offset) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Byte offset into the offending file, for binary format errors.
  std::optional<std::uint64_t> offset() const noexcept { return offset_; }

 private:
  ErrorKind kind_;
  std::optional<std::uint64_t> offset_;
};

}  // namespace facerank
