// errors.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef POF_ERRORS_HPP
#define POF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pof {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A query outside the supported domain (e.g. time outside a route span).
class OutOfRangeError : public Error {
 public:
  explicit OutOfRangeError(const std::string& what) : Error(what) {}
};

// Malformed or inconsistent input data.
class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& what) : Error(what) {}
};

// Two traces cannot be paired within the alignment tolerance.
class MisalignmentError : public Error {
 public:
  explicit MisalignmentError(const std::string& what) : Error(what) {}
};

// Training data admits no threshold separating the two classes.
class InseparableTrainingError : public Error {
 public:
  explicit InseparableTrainingError(const std::string& what) : Error(what) {}
};

}  // namespace pof

#endif  // POF_ERRORS_HPP
