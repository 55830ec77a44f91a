#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace modref {

/// Base error. `category()` is a short machine-parsable tag; the CLI prints
/// failures as a single line "error: <category>: <message>".
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

#define MODREF_DEFINE_ERROR(NAME, TAG)                             \
  class NAME : public Error {                                      \
   public:                                                         \
    explicit NAME(const std::string& message) : Error(TAG, message) {} \
  }

MODREF_DEFINE_ERROR(FormatError, "format");          // bad magic / unsupported header
MODREF_DEFINE_ERROR(LengthError, "length");          // truncated payload
MODREF_DEFINE_ERROR(ValidationError, "validation");  // invariant violated on data
MODREF_DEFINE_ERROR(RangeError, "range");            // value out of representable range
MODREF_DEFINE_ERROR(VersionError, "version");        // schema / checkpoint mismatch
MODREF_DEFINE_ERROR(ShapeError, "shape");            // tensor / image shape mismatch
MODREF_DEFINE_ERROR(ConfigError, "config");          // invalid configuration
MODREF_DEFINE_ERROR(IndexError, "index");            // index out of range
MODREF_DEFINE_ERROR(GenerationError, "generation");  // procedural generation failed
MODREF_DEFINE_ERROR(DatasetError, "dataset");        // missing / inconsistent dataset files
MODREF_DEFINE_ERROR(EvaluationError, "evaluation");  // metric undefined (e.g. empty mask)
MODREF_DEFINE_ERROR(TrainingError, "training");      // non-finite loss / gradient
MODREF_DEFINE_ERROR(IoError, "io");                  // file system failure
MODREF_DEFINE_ERROR(PaletteError, "palette");        // label missing from palette
MODREF_DEFINE_ERROR(UnsupportedError, "unsupported");

#undef MODREF_DEFINE_ERROR

}  // namespace modref
