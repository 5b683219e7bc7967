#pragma once

#include <stdexcept>
#include <string>

namespace pitchside {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input stream is not a usable corpus (e.g. most lines malformed).
class CorpusFormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration, lexicon, profile or annotation file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A mathematical quantity is undefined for the given input.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage was requested before the stage it depends on.
class PrerequisiteError : public Error {
 public:
  PrerequisiteError(const std::string& stage, const std::string& missing)
      : Error("stage '" + stage + "' needs artifacts from stage '" + missing +
              "'; run `pitchside " + missing + "` first"),
        missing_stage_(missing) {}

  const std::string& missing_stage() const { return missing_stage_; }

 private:
  std::string missing_stage_;
};

}  // namespace pitchside
