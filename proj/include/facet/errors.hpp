#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace facet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourcePosition {
  std::size_t offset = 0;
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, in bytes
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, SourcePosition position)
      : Error(message + " (" + std::to_string(position.line) + ":" +
              std::to_string(position.column) + ")"),
        message_(message),
        position_(position) {}

  const std::string& message() const { return message_; }
  const SourcePosition& position() const { return position_; }

 private:
  std::string message_;
  SourcePosition position_;
};

class NoComponentFound : public Error {
 public:
  using Error::Error;
};

class UnknownProperty : public Error {
 public:
  explicit UnknownProperty(std::string property)
      : Error("unknown property \"" + property + "\""),
        property_(std::move(property)) {}

  const std::string& property() const { return property_; }

 private:
  std::string property_;
};

class NotAStoryFile : public Error {
 public:
  using Error::Error;
};

class UnserializableValue : public Error {
 public:
  using Error::Error;
};

class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class MalformedResponse : public Error {
 public:
  using Error::Error;
};

class QuotaExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace facet
