#include "stochcat/sample_space.hpp"

#include <string>

#include "stochcat/errors.hpp"
#include "stochcat/special.hpp"

namespace stochcat {
namespace {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

SampleSpace::SampleSpace(int k, BaseMeasure measure) : k_(k), measure_(measure) {
  if (k < 1) throw DimensionError("sample space dimension must be >= 1, got " + std::to_string(k));
}

std::uint64_t SampleStream::bits(std::uint64_t offset) const {
  // Two rounds so that nearby keys and nearby counters decorrelate.
  return mix64(mix64(key_) ^ ((counter_ + offset) * kGolden + 0x632be59bd9b4e019ULL));
}

double SampleStream::uniform(std::uint64_t offset) const {
  // 52 bits, shifted by half a step so 0 and 1 are unreachable. With 53 bits
  // the top value 1 - 2^-54 would round to 1.
  return (static_cast<double>(bits(offset) >> 12) + 0.5) * 0x1.0p-52;
}

double SampleStream::normal(std::uint64_t offset) const { return normal_quantile(uniform(offset)); }

SampleStream SampleStream::split(std::uint64_t i) const {
  const std::uint64_t child = mix64(mix64(key_ + kGolden * (i + 1)) ^ mix64(counter_ ^ 0xd1b54a32d192ed03ULL));
  return {child, 0};
}

std::vector<SampleStream> SampleStream::split_n(std::size_t m) const {
  std::vector<SampleStream> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(split(i));
  return out;
}

OmegaView::OmegaView(std::span<const double> data, int k) : data_(data), k_(k) {
  if (k < 1 || data.size() % static_cast<std::size_t>(k) != 0)
    throw DimensionError("omega data length is not a multiple of the block dimension");
}

std::span<const double> OmegaView::block(std::size_t i) const {
  if (i >= blocks()) throw DimensionError("omega block index out of range");
  return data_.subspan(i * static_cast<std::size_t>(k_), static_cast<std::size_t>(k_));
}

OmegaView OmegaView::sub(std::size_t first, std::size_t count) const {
  if (first + count > blocks()) throw DimensionError("omega block range out of range");
  const auto k = static_cast<std::size_t>(k_);
  return {data_.subspan(first * k, count * k), k_};
}

OmegaVector::OmegaVector(int k, std::vector<double> flat) : k_(k), data_(std::move(flat)) {
  if (k < 1 || data_.size() % static_cast<std::size_t>(k) != 0)
    throw DimensionError("omega data length is not a multiple of the block dimension");
}

OmegaVector OmegaVector::repeated(std::span<const double> block, std::size_t n) {
  OmegaVector out(static_cast<int>(block.size()));
  for (std::size_t i = 0; i < n; ++i) out.push_block(block);
  return out;
}

void OmegaVector::push_block(std::span<const double> block) {
  if (block.size() != static_cast<std::size_t>(k_)) throw DimensionError("omega block has wrong length");
  data_.insert(data_.end(), block.begin(), block.end());
}

OmegaVector sample_omega(const SampleSpace& space, std::size_t n, const SampleStream& stream) {
  const auto k = static_cast<std::size_t>(space.dim());
  std::vector<double> flat(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    const SampleStream sub = stream.split(i);
    for (std::size_t j = 0; j < k; ++j)
      flat[i * k + j] = space.measure() == BaseMeasure::Uniform01 ? sub.uniform(j) : sub.normal(j);
  }
  return {space.dim(), std::move(flat)};
}

OmegaVector concat_omega(const OmegaVector& left, const OmegaVector& right) {
  if (left.block_dim() != right.block_dim())
    throw DimensionError("concat_omega: block dimensions differ (" + std::to_string(left.block_dim()) + " vs " +
                         std::to_string(right.block_dim()) + ")");
  std::vector<double> flat(left.flat().begin(), left.flat().end());
  flat.insert(flat.end(), right.flat().begin(), right.flat().end());
  return {left.block_dim(), std::move(flat)};
}

}  // namespace stochcat
