#include "dipe/error.hpp"

namespace dipe {

namespace {

std::string format_message(FormatError::Kind kind, const std::string& path,
                           std::optional<std::uint64_t> offset, const std::string& detail) {
  std::string msg = path + ": " + to_string(kind);
  if (offset) msg += " at byte " + std::to_string(*offset);
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

FormatError::FormatError(Kind kind, std::string path, std::optional<std::uint64_t> offset,
                         const std::string& detail)
    : Error(format_message(kind, path, offset, detail)),
      kind_(kind),
      path_(std::move(path)),
      offset_(offset) {}

RleError::RleError(Kind kind, std::size_t token_index, const std::string& detail)
    : Error(std::string("rle ") + to_string(kind) + " at token " + std::to_string(token_index) +
            (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      token_index_(token_index) {}

ManifestError::ManifestError(Kind kind, const std::string& detail)
    : Error(std::string("manifest ") + to_string(kind) + ": " + detail), kind_(kind) {}

const char* to_string(FormatError::Kind kind) noexcept {
  switch (kind) {
    case FormatError::Kind::bad_magic: return "bad magic";
    case FormatError::Kind::version_mismatch: return "version mismatch";
    case FormatError::Kind::bad_header: return "bad header";
    case FormatError::Kind::truncated: return "truncated payload";
    case FormatError::Kind::trailing_data: return "trailing data";
    case FormatError::Kind::out_of_range: return "value out of range";
  }
  return "format error";
}

const char* to_string(RleError::Kind kind) noexcept {
  switch (kind) {
    case RleError::Kind::odd_token_count: return "odd token count";
    case RleError::Kind::not_an_integer: return "non-integer token";
    case RleError::Kind::bad_run: return "invalid run";
    case RleError::Kind::overlap: return "overlapping run";
    case RleError::Kind::out_of_bounds: return "run out of bounds";
  }
  return "rle error";
}

const char* to_string(ManifestError::Kind kind) noexcept {
  switch (kind) {
    case ManifestError::Kind::schema: return "schema error";
    case ManifestError::Kind::missing_prediction: return "missing prediction";
    case ManifestError::Kind::dimension_mismatch: return "dimension mismatch";
    case ManifestError::Kind::duplicate_model: return "duplicate model_id";
    case ManifestError::Kind::duplicate_slice: return "duplicate slice id";
    case ManifestError::Kind::unknown_class: return "unknown class";
  }
  return "manifest error";
}

}  // namespace dipe
