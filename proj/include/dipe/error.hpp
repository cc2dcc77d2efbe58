#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace dipe {

/// Base of every data/validation failure raised by the library. The CLI maps
/// these to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Malformed DIPE tensor file.
class FormatError : public Error {
 public:
  enum class Kind { bad_magic, version_mismatch, bad_header, truncated, trailing_data, out_of_range };

  FormatError(Kind kind, std::string path, std::optional<std::uint64_t> offset,
              const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }
  std::optional<std::uint64_t> offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::string path_;
  std::optional<std::uint64_t> offset_;
};

/// Malformed run-length string. `token_index` is 0-based.
class RleError : public Error {
 public:
  enum class Kind { odd_token_count, not_an_integer, bad_run, overlap, out_of_bounds };

  RleError(Kind kind, std::size_t token_index, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  std::size_t token_index() const noexcept { return token_index_; }

 private:
  Kind kind_;
  std::size_t token_index_;
};

class ManifestError : public Error {
 public:
  enum class Kind {
    schema,
    missing_prediction,
    dimension_mismatch,
    duplicate_model,
    duplicate_slice,
    unknown_class,
  };

  ManifestError(Kind kind, const std::string& detail);

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A caller broke an operation's precondition (budget out of range, candidate
/// already in the ensemble, mismatched dimensions, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

const char* to_string(FormatError::Kind kind) noexcept;
const char* to_string(RleError::Kind kind) noexcept;
const char* to_string(ManifestError::Kind kind) noexcept;

}  // namespace dipe
