// src/gctc/error.h
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef GCTC_ERROR_H_
#define GCTC_ERROR_H_

#include <stdexcept>
#include <string>

namespace gctc {

// Base class for all toolkit errors. CLI maps these to exit code 2
// (input/data error); anything else is an internal error (exit 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries "path:line: message" when known.
class ParseError : public Error {
 public:
  using Error::Error;
  ParseError(const std::string& path, int line, const std::string& message)
      : Error(path + ":" + std::to_string(line) + ": " + message) {}
};

class UnknownTokenError : public Error {
 public:
  explicit UnknownTokenError(const std::string& surface)
      : Error("unknown token: \"" + surface + "\""), surface_(surface) {}
  const std::string& surface() const { return surface_; }

 private:
  std::string surface_;
};

class BlankInSequenceError : public Error {
 public:
  using Error::Error;
};

class NoAlignablePairsError : public Error {
 public:
  using Error::Error;
};

class UnalignableError : public Error {
 public:
  using Error::Error;
};

// No segmentation of the grapheme sequence into dictionary keys exists.
class NoCoverError : public Error {
 public:
  using Error::Error;
};

class VocabMismatchError : public Error {
 public:
  using Error::Error;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class EmptyReferenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gctc

#endif  // GCTC_ERROR_H_
