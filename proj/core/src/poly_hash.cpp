#include "sketchrec/poly_hash.hpp"

#include <stdexcept>
#include <utility>

namespace sketchrec {

PolyHash::PolyHash(std::vector<std::uint64_t> coefficients, std::uint64_t domain, std::uint64_t range,
                   PrimeField field)
    : coeffs_(std::move(coefficients)), domain_(domain), range_(range), field_(field) {
  if (coeffs_.empty()) throw std::invalid_argument("PolyHash: independence t must be at least 1");
  if (range_ == 0) throw std::invalid_argument("PolyHash: range must be positive");
  if (domain_ > field_.modulus()) throw std::invalid_argument("PolyHash: domain exceeds field size");
  for (auto& c : coeffs_) c = field_.reduce(c);
}

std::uint64_t PolyHash::field_value(std::uint64_t i) const {
  const std::uint64_t x = field_.reduce(i);
  std::uint64_t acc = 0;
  for (std::size_t j = coeffs_.size(); j-- > 0;) acc = field_.add(field_.mul(acc, x), coeffs_[j]);
  return acc;
}

std::uint64_t PolyHash::eval(std::uint64_t i) const {
  if (i >= domain_) throw std::out_of_range("PolyHash::eval: index outside domain");
  return field_value(i) % range_;
}

template <class Out>
void PolyHash::tabulate(std::uint64_t first, std::uint64_t count, Out&& emit) const {
  if (count == 0) return;
  if (first > domain_ || count > domain_ - first) {
    throw std::out_of_range("PolyHash::multipoint_eval: range outside domain");
  }
  const std::size_t t = coeffs_.size();
  if (count < 2 * t) {
    for (std::uint64_t j = 0; j < count; ++j) emit(j, field_value(first + j) % range_);
    return;
  }
  // D[j] = j-th forward difference at the current point; D[t-1] is constant.
  std::vector<std::uint64_t> d(t + 1, 0);
  for (std::size_t j = 0; j < t; ++j) d[j] = field_value(first + j);
  for (std::size_t level = 1; level < t; ++level) {
    for (std::size_t j = t - 1; j >= level; --j) d[j] = field_.sub(d[j], d[j - 1]);
  }
  const std::uint64_t p = field_.modulus();
  const std::uint64_t B = range_;
  std::uint64_t* D = d.data();
  const std::size_t last = t - 1;
  for (std::uint64_t j = 0; j < count; ++j) {
    emit(j, D[0] % B);
    for (std::size_t q = 0; q < last; ++q) {
      std::uint64_t s = D[q] + D[q + 1];
      D[q] = s >= p ? s - p : s;
    }
  }
}

std::vector<std::uint64_t> PolyHash::multipoint_eval(std::uint64_t first, std::uint64_t count) const {
  std::vector<std::uint64_t> out(count);
  tabulate(first, count, [&](std::uint64_t j, std::uint64_t v) { out[j] = v; });
  return out;
}

void PolyHash::multipoint_eval(std::uint64_t first, std::span<std::uint32_t> out) const {
  if (range_ > (std::uint64_t{1} << 32)) throw std::invalid_argument("PolyHash: range too large for 32-bit table");
  tabulate(first, out.size(), [&](std::uint64_t j, std::uint64_t v) { out[j] = static_cast<std::uint32_t>(v); });
}

PolyHash make_hash(std::size_t t, std::uint64_t n, std::uint64_t B, Rng& rng, PrimeField field) {
  if (t == 0) throw std::invalid_argument("make_hash: t must be at least 1");
  if (B == 0) throw std::invalid_argument("make_hash: range must be positive");
  if (n > field.modulus()) throw std::invalid_argument("make_hash: domain exceeds field size");
  std::uniform_int_distribution<std::uint64_t> coef(0, field.modulus() - 1);
  std::vector<std::uint64_t> c(t);
  for (auto& v : c) v = coef(rng);
  return PolyHash(std::move(c), n, B, field);
}

PolyHash make_hash(std::size_t t, std::uint64_t n, std::uint64_t B, std::uint64_t seed, PrimeField field) {
  Rng rng(seed);
  return make_hash(t, n, B, rng, field);
}

TabulatedHashes::TabulatedHashes(std::size_t rows, std::size_t domain, std::size_t buckets,
                                 std::size_t independence, std::uint64_t seed)
    : rows_(rows), domain_(domain), buckets_(buckets), independence_(independence), table_(rows * domain) {
  for (std::size_t r = 0; r < rows; ++r) {
    PolyHash h = make_hash(independence, domain, buckets, derive_seed(seed, r));
    h.multipoint_eval(0, std::span<std::uint32_t>(table_.data() + r * domain, domain));
  }
}

TabulatedSigns::TabulatedSigns(std::size_t rows, std::size_t domain, std::size_t independence,
                               std::uint64_t seed)
    : rows_(rows), domain_(domain), table_(rows * domain) {
  std::vector<std::uint32_t> buf(domain);
  for (std::size_t r = 0; r < rows; ++r) {
    PolyHash h = make_hash(independence, domain, 2, derive_seed(seed, r));
    h.multipoint_eval(0, std::span<std::uint32_t>(buf));
    for (std::size_t i = 0; i < domain; ++i) table_[r * domain + i] = buf[i] == 0 ? -1 : 1;
  }
}

}  // namespace sketchrec
