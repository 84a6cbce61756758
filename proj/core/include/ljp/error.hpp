#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ljp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LJP_DECLARE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

LJP_DECLARE_ERROR(DimensionError);
LJP_DECLARE_ERROR(RankError);
LJP_DECLARE_ERROR(IndexError);
LJP_DECLARE_ERROR(DegenerateInputError);
LJP_DECLARE_ERROR(EmptyInputError);
LJP_DECLARE_ERROR(DomainError);
LJP_DECLARE_ERROR(LabelError);
LJP_DECLARE_ERROR(TopologyError);
LJP_DECLARE_ERROR(OrderingError);
LJP_DECLARE_ERROR(AnnotationError);
LJP_DECLARE_ERROR(SpecError);
LJP_DECLARE_ERROR(ConfigError);
LJP_DECLARE_ERROR(SchemaError);
LJP_DECLARE_ERROR(IoError);

#undef LJP_DECLARE_ERROR

/// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ljp
