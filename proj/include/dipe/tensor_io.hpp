#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dipe/tensor.hpp"

namespace dipe::io {

// DIPE tensor container, all fields little-endian:
//   [0,4)   magic "DIPE"
//   [4,6)   u16 format version (1)
//   [6,8)   u16 class count C
//   [8,12)  u32 height H
//   [12,16) u32 width W
//   [16,..) C*H*W float32, class-major, row-major per plane
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 16;

std::vector<std::uint8_t> encode_probability_map(const ProbabilityMap& map);

/// `source_name` only labels error messages.
ProbabilityMap decode_probability_map(std::span<const std::uint8_t> bytes,
                                      const std::string& source_name = "<memory>");

/// Reads just the header and checks the file is large enough for its payload.
Shape read_probability_map_shape(const std::filesystem::path& source);

void write_probability_map(const ProbabilityMap& map, const std::filesystem::path& destination);
ProbabilityMap read_probability_map(const std::filesystem::path& source);

/// Runs are (start, length) pairs over the 1-indexed row-major flattening.
BinaryPlane decode_rle(std::string_view encoding, std::uint32_t height, std::uint32_t width);
std::string encode_rle(std::span<const std::uint8_t> plane);
inline std::string encode_rle(const BinaryPlane& plane) { return encode_rle(plane.pixels); }

/// One row of an `id,class,segmentation` CSV.
struct RleRow {
  std::string id;
  std::string class_name;
  std::string segmentation;

  bool operator==(const RleRow&) const = default;
};

std::vector<RleRow> read_rle_csv(const std::filesystem::path& source);
void write_rle_csv(const std::filesystem::path& destination, std::span<const RleRow> rows);

/// Rows for every class plane of `masks` under `id`, empty planes included.
std::vector<RleRow> to_rle_rows(const std::string& id, std::span<const std::string> class_names,
                                const BinaryMaskSet& masks);

std::vector<std::uint8_t> read_file(const std::filesystem::path& source);
void write_file(const std::filesystem::path& destination, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& destination, std::string_view text);

}  // namespace dipe::io
