#include "dipe/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dipe/error.hpp"

namespace dipe {

namespace {

void check_shape(const Shape& shape) {
  if (shape.classes == 0 || shape.height == 0 || shape.width == 0) {
    throw ContractError("tensor dimensions must be >= 1, got " + std::to_string(shape.classes) + "x" +
                        std::to_string(shape.height) + "x" + std::to_string(shape.width));
  }
}

}  // namespace

ProbabilityMap::ProbabilityMap(Shape shape, std::vector<float> values)
    : shape_(shape), values_(std::move(values)) {
  check_shape(shape_);
  if (values_.size() != shape_.size()) {
    throw ContractError("probability map holds " + std::to_string(values_.size()) + " values, expected " +
                        std::to_string(shape_.size()));
  }
}

ProbabilityMap::ProbabilityMap(Shape shape, float fill) : shape_(shape) {
  check_shape(shape_);
  values_.assign(shape_.size(), fill);
}

BinaryMaskSet::BinaryMaskSet(Shape shape) : shape_(shape) {
  check_shape(shape_);
  pixels_.assign(shape_.size(), 0);
}

BinaryMaskSet::BinaryMaskSet(Shape shape, std::vector<std::uint8_t> pixels)
    : shape_(shape), pixels_(std::move(pixels)) {
  check_shape(shape_);
  if (pixels_.size() != shape_.size()) {
    throw ContractError("mask set holds " + std::to_string(pixels_.size()) + " pixels, expected " +
                        std::to_string(shape_.size()));
  }
  if (std::any_of(pixels_.begin(), pixels_.end(), [](std::uint8_t p) { return p > 1; })) {
    throw ContractError("mask pixels must be 0 or 1");
  }
}

void BinaryMaskSet::set_plane(std::uint32_t c, const BinaryPlane& plane) {
  if (c >= shape_.classes || plane.height != shape_.height || plane.width != shape_.width) {
    throw ContractError("plane does not fit mask set");
  }
  std::copy(plane.pixels.begin(), plane.pixels.end(), this->plane(c).begin());
}

}  // namespace dipe
