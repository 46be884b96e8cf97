#include "sketchrec/guv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sketchrec/prime_field.hpp"
#include "sketchrec/select.hpp"

namespace sketchrec {
namespace {

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t q) {
  std::uint64_t r = 1, b = a % q;
  for (std::uint64_t e = q - 2; e != 0; e >>= 1) {
    if (e & 1) r = r * b % q;
    b = b * b % q;
  }
  return static_cast<std::uint32_t>(r);
}

double log_binomial(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

std::size_t checked_pow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t j = 0; j < e; ++j) {
    if (r > std::numeric_limits<std::uint32_t>::max() / base) throw std::overflow_error("GUV: vertex count too large");
    r *= base;
  }
  return r;
}

}  // namespace

GfPoly gf_trim(GfPoly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

GfPoly gf_mod(GfPoly a, const GfPoly& modulus, std::uint32_t q) {
  GfPoly m = gf_trim(modulus);
  if (m.empty()) throw std::invalid_argument("gf_mod: zero modulus");
  a = gf_trim(std::move(a));
  const std::size_t dm = m.size() - 1;
  const std::uint64_t lead_inv = inv_mod(m.back(), q);
  while (a.size() > dm) {
    const std::size_t shift = a.size() - 1 - dm;
    const std::uint64_t factor = a.back() * lead_inv % q;
    for (std::size_t j = 0; j <= dm; ++j) {
      a[shift + j] = static_cast<std::uint32_t>((a[shift + j] + q - factor * m[j] % q) % q);
    }
    a = gf_trim(std::move(a));
  }
  return a;
}

GfPoly gf_mul_mod(const GfPoly& a, const GfPoly& b, const GfPoly& modulus, std::uint32_t q) {
  if (a.empty() || b.empty()) return {};
  GfPoly prod(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % q);
    }
  }
  return gf_mod(std::move(prod), modulus, q);
}

GfPoly gf_pow_mod(GfPoly a, std::uint64_t e, const GfPoly& modulus, std::uint32_t q) {
  GfPoly result = gf_mod(GfPoly{1}, modulus, q);
  a = gf_mod(std::move(a), modulus, q);
  while (e != 0) {
    if (e & 1) result = gf_mul_mod(result, a, modulus, q);
    a = gf_mul_mod(a, a, modulus, q);
    e >>= 1;
  }
  return result;
}

std::uint32_t gf_eval(const GfPoly& f, std::uint32_t y, std::uint32_t q) {
  std::uint64_t acc = 0;
  for (std::size_t j = f.size(); j-- > 0;) acc = (acc * y + f[j]) % q;
  return static_cast<std::uint32_t>(acc);
}

bool gf_is_irreducible(const GfPoly& monic, std::uint32_t q) {
  GfPoly e = gf_trim(monic);
  if (e.size() < 2) return false;
  const std::size_t deg = e.size() - 1;
  for (std::size_t d = 1; 2 * d <= deg; ++d) {
    GfPoly g(d + 1, 0);
    g[d] = 1;
    const std::size_t count = checked_pow(q, d);
    for (std::size_t code = 0; code < count; ++code) {
      std::size_t c = code;
      for (std::size_t j = 0; j < d; ++j) {
        g[j] = static_cast<std::uint32_t>(c % q);
        c /= q;
      }
      if (gf_mod(e, g, q).empty()) return false;
    }
  }
  return true;
}

GfPoly gf_find_irreducible(std::uint32_t q, std::uint32_t degree) {
  if (!is_prime(q) || q >= (1u << 16)) throw std::invalid_argument("gf_find_irreducible: q must be a prime below 2^16");
  if (degree == 0) throw std::invalid_argument("gf_find_irreducible: degree must be positive");
  GfPoly e(degree + 1, 0);
  e[degree] = 1;
  const std::size_t count = checked_pow(q, degree);
  for (std::size_t code = 0; code < count; ++code) {
    std::size_t c = code;
    for (std::size_t j = 0; j < degree; ++j) {
      e[j] = static_cast<std::uint32_t>(c % q);
      c /= q;
    }
    if (gf_is_irreducible(e, q)) return e;
  }
  throw std::logic_error("gf_find_irreducible: none found");
}

GuvParams make_guv_params(std::uint32_t q, std::uint32_t a, std::uint32_t c, std::uint32_t h) {
  if (c == 0 || h < 2) throw std::invalid_argument("make_guv_params: need c >= 1 and h >= 2");
  GuvParams p{q, a, c, h, gf_find_irreducible(q, a)};
  return p;
}

GuvParams instantiate_guv(std::size_t n_left, std::size_t K, double zeta) {
  if (n_left < 2 || K < 1 || !(zeta > 0 && zeta < 1)) throw std::invalid_argument("instantiate_guv: bad arguments");
  const std::uint32_t h = 2;
  std::uint32_t c = 1;
  while ((std::size_t{1} << c) < K) ++c;
  for (std::uint32_t q = 2; q < (1u << 16); ++q) {
    if (!is_prime(q)) continue;
    std::uint32_t a = 1;
    std::size_t cap = q;
    while (cap < n_left) {
      cap *= q;
      ++a;
    }
    if (static_cast<double>(a) * h * c <= zeta * q) return make_guv_params(q, a, c, h);
  }
  throw std::invalid_argument("instantiate_guv: no prime below 2^16 satisfies the bound");
}

GuvExpander::GuvExpander(GuvParams params) : p_(std::move(params)) {
  if (!is_prime(p_.q) || p_.q >= (1u << 16)) throw std::invalid_argument("GuvExpander: q must be a prime below 2^16");
  if (p_.irreducible.size() != p_.a + 1 || p_.irreducible.back() != 1 || !gf_is_irreducible(p_.irreducible, p_.q)) {
    throw std::invalid_argument("GuvExpander: E must be monic irreducible of degree a");
  }
  left_ = checked_pow(p_.q, p_.a);
  right_ = checked_pow(p_.q, p_.c + 1);
}

GfPoly GuvExpander::left_poly(std::size_t index) const {
  if (index >= left_) throw std::out_of_range("GuvExpander: left index out of range");
  GfPoly f(p_.a, 0);
  for (std::uint32_t j = 0; j < p_.a; ++j) {
    f[j] = static_cast<std::uint32_t>(index % p_.q);
    index /= p_.q;
  }
  return f;
}

std::vector<std::uint32_t> GuvExpander::neighbor_tuple(const GfPoly& f, std::uint32_t y) const {
  std::vector<std::uint32_t> tuple{y % p_.q};
  GfPoly fi = gf_mod(f, p_.irreducible, p_.q);
  for (std::uint32_t i = 0; i < p_.c; ++i) {
    if (i > 0) fi = gf_pow_mod(fi, p_.h, p_.irreducible, p_.q);
    tuple.push_back(gf_eval(fi, y, p_.q));
  }
  return tuple;
}

std::size_t GuvExpander::encode(const std::vector<std::uint32_t>& tuple) const {
  std::size_t idx = 0;
  for (std::size_t j = tuple.size(); j-- > 0;) idx = idx * p_.q + tuple[j];
  return idx;
}

std::vector<std::size_t> GuvExpander::neighbors(std::size_t index) const {
  const GfPoly f = left_poly(index);
  std::vector<GfPoly> folds{gf_mod(f, p_.irreducible, p_.q)};
  for (std::uint32_t i = 1; i < p_.c; ++i) folds.push_back(gf_pow_mod(folds.back(), p_.h, p_.irreducible, p_.q));
  std::vector<std::size_t> out(p_.q);
  for (std::uint32_t y = 0; y < p_.q; ++y) {
    std::size_t idx = 0;
    for (std::size_t i = folds.size(); i-- > 0;) idx = idx * p_.q + gf_eval(folds[i], y, p_.q);
    out[y] = idx * p_.q + y;
  }
  return out;
}

NeighborTable GuvExpander::table(std::size_t n_left) const {
  if (n_left > left_) throw std::invalid_argument("GuvExpander::table: more left vertices than polynomials");
  NeighborTable t{n_left, p_.q, right_, {}};
  t.adj.reserve(n_left * p_.q);
  for (std::size_t i = 0; i < n_left; ++i) {
    for (std::size_t v : neighbors(i)) t.adj.push_back(static_cast<std::uint32_t>(v));
  }
  return t;
}

ExpansionReport verify_expansion(const NeighborTable& g, std::size_t K, double required_degree) {
  if (K == 0 || K > g.left) throw std::invalid_argument("verify_expansion: need 1 <= K <= left size");
  if (log_binomial(static_cast<double>(g.left), static_cast<double>(K)) > std::log(kMaxExpansionSets)) {
    throw std::invalid_argument("verify_expansion: too many subsets to enumerate");
  }
  ExpansionReport rep;
  rep.set_size = K;
  rep.min_neighborhood = std::numeric_limits<std::size_t>::max();
  std::vector<std::uint32_t> count(g.right, 0);
  std::vector<std::size_t> chosen(K);
  std::size_t covered = 0;

  auto add = [&](std::size_t v) {
    for (std::size_t d = 0; d < g.degree; ++d) covered += count[g(v, d)]++ == 0;
  };
  auto remove = [&](std::size_t v) {
    for (std::size_t d = 0; d < g.degree; ++d) covered -= --count[g(v, d)] == 0;
  };
  auto recurse = [&](auto&& self, std::size_t depth, std::size_t start) -> void {
    if (depth == K) {
      ++rep.sets_checked;
      if (covered < rep.min_neighborhood) {
        rep.min_neighborhood = covered;
        rep.witness = chosen;
      }
      return;
    }
    for (std::size_t v = start; v + (K - depth) <= g.left; ++v) {
      chosen[depth] = v;
      add(v);
      self(self, depth + 1, v + 1);
      remove(v);
    }
  };
  recurse(recurse, 0, 0);
  const double kd = static_cast<double>(K * g.degree);
  rep.zeta = 1.0 - static_cast<double>(rep.min_neighborhood) / kd;
  rep.passed = static_cast<double>(rep.min_neighborhood) >= required_degree * static_cast<double>(K) - 1e-9;
  return rep;
}

DetCertificate certify_det(const NeighborTable& g, double eps, double c_list) {
  if (!(eps > 0 && eps < 1) || !(c_list > 0)) throw std::invalid_argument("certify_det: bad eps or c");
  const auto K = static_cast<std::size_t>(std::ceil(c_list / eps - 1e-9));
  DetCertificate cert;
  cert.c_list = c_list;
  cert.expansion = verify_expansion(g, std::min(K, g.left), 0.0);
  const double slack = 1.0 - cert.expansion.zeta;
  cert.certified = K <= g.left && slack > 0 && 2.0 / slack < c_list;
  cert.expansion.passed = cert.certified;
  return cert;
}

DetHHSketch::DetHHSketch(const GuvExpander& g, std::size_t n, double eps, double c_list)
    : DetHHSketch((g.right_size() > kMaxDenseCounters
                       ? throw std::invalid_argument("DetHHSketch: q^(c+1) counters exceed the dense limit")
                       : g.table(n)),
                  eps, c_list) {}

DetHHSketch::DetHHSketch(NeighborTable table, double eps, double c_list) : g_(std::move(table)) {
  if (!(eps > 0 && eps < 1) || !(c_list > 0)) throw std::invalid_argument("DetHHSketch: bad eps or c");
  if (g_.right > kMaxDenseCounters) throw std::invalid_argument("DetHHSketch: counters exceed the dense limit");
  list_size_ = std::min(g_.left, static_cast<std::size_t>(std::ceil((c_list + 1) / eps - 1e-9)));
  counters_.assign(g_.right, 0.0);
}

void DetHHSketch::update(std::size_t i, double delta) {
  if (i >= g_.left) throw std::out_of_range("DetHHSketch::update: index outside [n]");
  for (std::size_t d = 0; d < g_.degree; ++d) counters_[g_(i, d)] += delta;
}

void DetHHSketch::ingest(const TurnstileStream& stream) {
  for (const Update& u : stream.updates) update(u.index, u.delta);
}

double DetHHSketch::estimate(std::size_t i) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < g_.degree; ++d) best = std::min(best, counters_[g_(i, d)]);
  return best;
}

std::vector<std::size_t> DetHHSketch::query() const {
  std::vector<std::pair<double, std::size_t>> scored(g_.left);
  for (std::size_t i = 0; i < g_.left; ++i) scored[i] = {estimate(i), i};
  return top_by_score(std::move(scored), list_size_);
}

}  // namespace sketchrec
