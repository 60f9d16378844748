#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace stochcat {

enum class BaseMeasure {
  Uniform01,  ///< uniform on the open cube (0,1)^k
  StdNormal,  ///< k independent standard normals
};

/// The base probability space Omega = R^k with its sampling measure.
class SampleSpace {
 public:
  SampleSpace() = default;
  SampleSpace(int k, BaseMeasure measure);

  [[nodiscard]] int dim() const { return k_; }
  [[nodiscard]] BaseMeasure measure() const { return measure_; }

  friend bool operator==(const SampleSpace&, const SampleSpace&) = default;

 private:
  int k_ = 1;
  BaseMeasure measure_ = BaseMeasure::Uniform01;
};

/// Counter-based, splittable stream. The value at offset j is a pure
/// function of (key, counter + j); nothing is mutated by drawing.
class SampleStream {
 public:
  SampleStream() = default;
  explicit SampleStream(std::uint64_t seed) : key_(seed) {}
  SampleStream(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

  [[nodiscard]] std::uint64_t bits(std::uint64_t offset) const;
  /// Uniform on the open interval (0, 1).
  [[nodiscard]] double uniform(std::uint64_t offset) const;
  /// Standard normal through the inverse CDF of uniform(offset).
  [[nodiscard]] double normal(std::uint64_t offset) const;

  /// The i-th child stream. Children of one parent never share draws with
  /// each other or with the parent.
  [[nodiscard]] SampleStream split(std::uint64_t i) const;
  [[nodiscard]] std::vector<SampleStream> split_n(std::size_t m) const;

  /// Same key, counter moved forward by `n`.
  [[nodiscard]] SampleStream advanced(std::uint64_t n) const { return {key_, counter_ + n}; }

  friend bool operator==(const SampleStream&, const SampleStream&) = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Non-owning view of n blocks of length k, stored contiguously.
class OmegaView {
 public:
  OmegaView() = default;
  OmegaView(std::span<const double> data, int k);

  [[nodiscard]] int block_dim() const { return k_; }
  [[nodiscard]] std::size_t blocks() const { return k_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(k_); }
  [[nodiscard]] std::span<const double> block(std::size_t i) const;
  /// Blocks [first, first + count).
  [[nodiscard]] OmegaView sub(std::size_t first, std::size_t count) const;
  [[nodiscard]] std::span<const double> flat() const { return data_; }

 private:
  std::span<const double> data_;
  int k_ = 1;
};

/// A point of Omega^n: n blocks of length k. n = 0 is the monoidal unit.
class OmegaVector {
 public:
  OmegaVector() = default;
  explicit OmegaVector(int k) : k_(k) {}
  OmegaVector(int k, std::vector<double> flat);

  /// n copies of a single block.
  static OmegaVector repeated(std::span<const double> block, std::size_t n);

  [[nodiscard]] int block_dim() const { return k_; }
  [[nodiscard]] std::size_t blocks() const { return data_.size() / static_cast<std::size_t>(k_); }
  [[nodiscard]] std::span<const double> block(std::size_t i) const { return view().block(i); }
  [[nodiscard]] std::span<const double> flat() const { return data_; }
  [[nodiscard]] OmegaView view() const { return {data_, k_}; }
  operator OmegaView() const { return view(); }  // NOLINT(google-explicit-constructor)

  void push_block(std::span<const double> block);

  friend bool operator==(const OmegaVector&, const OmegaVector&) = default;

 private:
  int k_ = 1;
  std::vector<double> data_;
};

/// n independent draws from the base measure; block i comes from stream.split(i).
OmegaVector sample_omega(const SampleSpace& space, std::size_t n, const SampleStream& stream);

/// Blocks of `left` followed by blocks of `right`.
OmegaVector concat_omega(const OmegaVector& left, const OmegaVector& right);

}  // namespace stochcat
