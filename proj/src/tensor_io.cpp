#include "dipe/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dipe/error.hpp"

namespace dipe::io {

namespace {

constexpr std::uint8_t kMagic[4] = {'D', 'I', 'P', 'E'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return std::uint32_t{b[at]} | (std::uint32_t{b[at + 1]} << 8) | (std::uint32_t{b[at + 2]} << 16) |
         (std::uint32_t{b[at + 3]} << 24);
}

bool in_unit_interval(float v) { return v >= 0.0f && v <= 1.0f; }  // false for NaN

Shape decode_header(std::span<const std::uint8_t> bytes, const std::string& source) {
  using Kind = FormatError::Kind;
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw FormatError(Kind::bad_magic, source, 0, "expected \"DIPE\"");
  }
  if (bytes.size() < kHeaderSize) {
    throw FormatError(Kind::truncated, source, bytes.size(), "header needs 16 bytes");
  }
  const std::uint16_t version = get_u16(bytes, 4);
  if (version != kFormatVersion) {
    throw FormatError(Kind::version_mismatch, source, 4,
                      "version " + std::to_string(version) + ", expected " + std::to_string(kFormatVersion));
  }
  Shape shape{get_u16(bytes, 6), get_u32(bytes, 8), get_u32(bytes, 12)};
  if (shape.classes == 0) throw FormatError(Kind::bad_header, source, 6, "class count is 0");
  if (shape.height == 0) throw FormatError(Kind::bad_header, source, 8, "height is 0");
  if (shape.width == 0) throw FormatError(Kind::bad_header, source, 12, "width is 0");
  return shape;
}

void check_payload_size(std::uint64_t file_size, const Shape& shape, const std::string& source) {
  const std::uint64_t expected = kHeaderSize + std::uint64_t{4} * shape.size();
  if (file_size < expected) {
    throw FormatError(FormatError::Kind::truncated, source, file_size,
                      "payload needs " + std::to_string(expected - kHeaderSize) + " bytes");
  }
  if (file_size > expected) {
    throw FormatError(FormatError::Kind::trailing_data, source, expected,
                      std::to_string(file_size - expected) + " extra bytes");
  }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto end = text.find(sep, begin);
    out.push_back(text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_probability_map(const ProbabilityMap& map) {
  const Shape& shape = map.shape();
  const auto values = map.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!in_unit_interval(values[i])) {
      throw ContractError("probability " + std::to_string(values[i]) + " at index " + std::to_string(i) +
                          " outside [0,1]");
    }
  }
  if (shape.classes > 0xffff) throw ContractError("class count exceeds u16");

  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 4 * values.size());
  for (std::uint8_t b : kMagic) out.push_back(b);
  put_u16(out, kFormatVersion);
  put_u16(out, static_cast<std::uint16_t>(shape.classes));
  put_u32(out, shape.height);
  put_u32(out, shape.width);
  for (float v : values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

ProbabilityMap decode_probability_map(std::span<const std::uint8_t> bytes, const std::string& source_name) {
  const Shape shape = decode_header(bytes, source_name);
  check_payload_size(bytes.size(), shape, source_name);
  std::vector<float> values(shape.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t at = kHeaderSize + 4 * i;
    const float v = std::bit_cast<float>(get_u32(bytes, at));
    if (!in_unit_interval(v)) {
      std::ostringstream detail;
      detail << "value " << v << " outside [0,1]";
      throw FormatError(FormatError::Kind::out_of_range, source_name, at, detail.str());
    }
    values[i] = v;
  }
  return ProbabilityMap(shape, std::move(values));
}

Shape read_probability_map_shape(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw IoError(source.string(), "cannot open for reading");
  std::vector<std::uint8_t> header(kHeaderSize);
  in.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(header.size()));
  header.resize(static_cast<std::size_t>(in.gcount()));
  const Shape shape = decode_header(header, source.string());
  std::error_code ec;
  const auto size = std::filesystem::file_size(source, ec);
  if (ec) throw IoError(source.string(), ec.message());
  check_payload_size(size, shape, source.string());
  return shape;
}

void write_probability_map(const ProbabilityMap& map, const std::filesystem::path& destination) {
  write_file(destination, encode_probability_map(map));
}

ProbabilityMap read_probability_map(const std::filesystem::path& source) {
  return decode_probability_map(read_file(source), source.string());
}

BinaryPlane decode_rle(std::string_view encoding, std::uint32_t height, std::uint32_t width) {
  using Kind = RleError::Kind;
  const std::uint64_t total = std::uint64_t{height} * width;
  BinaryPlane plane{height, width, std::vector<std::uint8_t>(total, 0)};

  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < encoding.size()) {
    while (pos < encoding.size() && (encoding[pos] == ' ' || encoding[pos] == '\t')) ++pos;
    const std::size_t begin = pos;
    while (pos < encoding.size() && encoding[pos] != ' ' && encoding[pos] != '\t') ++pos;
    if (pos > begin) tokens.push_back(encoding.substr(begin, pos - begin));
  }

  std::vector<std::uint64_t> numbers(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto tok = tokens[i];
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), numbers[i]);
    if (ec != std::errc{} || end != tok.data() + tok.size()) {
      throw RleError(Kind::not_an_integer, i, "\"" + std::string(tok) + "\"");
    }
  }
  if (numbers.size() % 2 != 0) throw RleError(Kind::odd_token_count, numbers.size() - 1, "");

  std::uint64_t next_free = 1;  // first 1-indexed pixel not yet covered
  for (std::size_t r = 0; r < numbers.size(); r += 2) {
    const std::uint64_t start = numbers[r];
    const std::uint64_t length = numbers[r + 1];
    if (start == 0) throw RleError(Kind::bad_run, r, "start must be >= 1");
    if (length == 0) throw RleError(Kind::bad_run, r + 1, "length must be >= 1");
    if (start < next_free) throw RleError(Kind::overlap, r, "run starts before previous run ended");
    if (start - 1 + length > total) {
      throw RleError(Kind::out_of_bounds, r + 1, "run ends past pixel " + std::to_string(total));
    }
    std::fill_n(plane.pixels.begin() + static_cast<std::ptrdiff_t>(start - 1), length, std::uint8_t{1});
    next_free = start + length;
  }
  return plane;
}

std::string encode_rle(std::span<const std::uint8_t> plane) {
  std::string out;
  std::size_t i = 0;
  while (i < plane.size()) {
    if (!plane[i]) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < plane.size() && plane[i]) ++i;
    if (!out.empty()) out += ' ';
    out += std::to_string(start + 1);
    out += ' ';
    out += std::to_string(i - start);
  }
  return out;
}

std::vector<RleRow> read_rle_csv(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) throw IoError(source.string(), "cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError(source.string(), "empty RLE CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id,class,segmentation") {
    throw IoError(source.string(), "expected header \"id,class,segmentation\", got \"" + line + "\"");
  }
  std::vector<RleRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() < 2 || cells.size() > 3) {
      throw IoError(source.string(), "line " + std::to_string(line_no) + ": expected 3 cells");
    }
    rows.push_back({std::string(cells[0]), std::string(cells[1]),
                    cells.size() == 3 ? std::string(cells[2]) : std::string()});
  }
  return rows;
}

void write_rle_csv(const std::filesystem::path& destination, std::span<const RleRow> rows) {
  std::string text = "id,class,segmentation\n";
  for (const auto& row : rows) {
    if (row.id.find_first_of(",\n") != std::string::npos ||
        row.class_name.find_first_of(",\n") != std::string::npos) {
      throw ContractError("RLE CSV ids and class names may not contain ',' or newlines");
    }
    text += row.id + "," + row.class_name + "," + row.segmentation + "\n";
  }
  write_text_file(destination, text);
}

std::vector<RleRow> to_rle_rows(const std::string& id, std::span<const std::string> class_names,
                                const BinaryMaskSet& masks) {
  if (class_names.size() != masks.shape().classes) throw ContractError("class name count does not match masks");
  std::vector<RleRow> rows;
  for (std::uint32_t c = 0; c < masks.shape().classes; ++c) {
    rows.push_back({id, class_names[c], encode_rle(masks.plane(c))});
  }
  return rows;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw IoError(source.string(), "cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(source.string(), "read failed");
  return bytes;
}

void write_file(const std::filesystem::path& destination, std::span<const std::uint8_t> bytes) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(destination.string(), "cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(destination.string(), "write failed");
}

void write_text_file(const std::filesystem::path& destination, std::string_view text) {
  write_file(destination, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                        text.size()));
}

}  // namespace dipe::io
