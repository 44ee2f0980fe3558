// Copyright 2026 The dgmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DGMEM_ERROR_HPP_
#define DGMEM_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dgmem {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query against a graph that has no nodes yet.
class NoNodesError : public Error {
 public:
  NoNodesError() : Error("graph memory has no nodes") {}
};

class InvalidNodeError : public Error {
 public:
  explicit InvalidNodeError(int id)
      : Error("unknown node id " + std::to_string(id)), id_(id) {}
  int id() const { return id_; }

 private:
  int id_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized input. `offset` is the byte position where parsing
// gave up.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

}  // namespace dgmem

#endif  // DGMEM_ERROR_HPP_
