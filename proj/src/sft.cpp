#include "livsic/sft.hpp"

#include <algorithm>
#include <climits>
#include <deque>
#include <numeric>
#include <sstream>

#include "livsic/error.hpp"

namespace livsic {

namespace {

long pmod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

Word primitive_root(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
    if (periodic) return Word(w.begin(), w.begin() + static_cast<long>(p));
  }
  return w;
}

using BoolMatrix = std::vector<std::vector<char>>;

BoolMatrix bool_multiply(const BoolMatrix& a, const BoolMatrix& b) {
  const std::size_t k = a.size();
  BoolMatrix r(k, std::vector<char>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t l = 0; l < k; ++l)
      if (a[i][l])
        for (std::size_t j = 0; j < k; ++j) r[i][j] |= b[l][j];
  return r;
}

}  // namespace

Symbol SftPoint::at(long i) const {
  const long c0 = -offset;
  const long nc = static_cast<long>(center->size());
  if (i < c0) {
    const long nl = static_cast<long>(left->size());
    return (*left)[static_cast<std::size_t>(nl - 1 - pmod(c0 - i - 1, nl))];
  }
  if (i < c0 + nc) return (*center)[static_cast<std::size_t>(i - c0)];
  const long nr = static_cast<long>(right->size());
  return (*right)[static_cast<std::size_t>(pmod(i - c0 - nc, nr))];
}

std::string SftPoint::to_string(long radius) const {
  std::ostringstream os;
  for (long i = -radius; i <= radius; ++i) {
    if (i == 0) os << '.';
    os << static_cast<int>(at(i));
  }
  return os.str();
}

SftPoint make_sft_point(Word left, Word center, Word right, long offset) {
  if (left.empty() || right.empty())
    throw Error(ErrorKind::precondition, "periodic tails must be nonempty words");
  return {std::make_shared<const Word>(std::move(left)), std::make_shared<const Word>(std::move(center)),
          std::make_shared<const Word>(std::move(right)), offset};
}

SftPoint periodic_sft_point(const Word& w) {
  const Word root = primitive_root(w);
  auto shared = std::make_shared<const Word>(root);
  return {shared, std::make_shared<const Word>(), shared, 0};
}

Sft::Sft(int alphabet, std::vector<std::vector<int>> transition, double theta)
    : alphabet_(alphabet), transition_(std::move(transition)), theta_(theta) {
  if (alphabet_ < 2 || alphabet_ > 16)
    throw Error(ErrorKind::precondition, "alphabet size must lie in [2, 16]");
  if (static_cast<int>(transition_.size()) != alphabet_)
    throw Error(ErrorKind::precondition, "transition matrix must be alphabet x alphabet");
  for (const auto& row : transition_) {
    if (static_cast<int>(row.size()) != alphabet_)
      throw Error(ErrorKind::precondition, "transition matrix must be alphabet x alphabet");
    for (int v : row)
      if (v != 0 && v != 1) throw Error(ErrorKind::precondition, "transition entries must be 0 or 1");
  }
  if (!(theta_ > 0 && theta_ < 1)) throw Error(ErrorKind::precondition, "theta must lie in (0, 1)");

  // Primitive iff some power up to (k-1)^2 + 1 is strictly positive.
  BoolMatrix t(static_cast<std::size_t>(alphabet_), std::vector<char>(static_cast<std::size_t>(alphabet_)));
  for (int i = 0; i < alphabet_; ++i)
    for (int j = 0; j < alphabet_; ++j) t[i][j] = static_cast<char>(transition_[i][j]);
  BoolMatrix p = t;
  bool primitive = false;
  const int bound = (alphabet_ - 1) * (alphabet_ - 1) + 1;
  for (int m = 1; m <= bound && !primitive; ++m) {
    primitive = std::all_of(p.begin(), p.end(), [](const auto& row) {
      return std::all_of(row.begin(), row.end(), [](char c) { return c != 0; });
    });
    p = bool_multiply(p, t);
  }
  if (!primitive)
    throw Error(ErrorKind::reducible, "transition matrix is not irreducible and aperiodic");

  hyp_.eps0 = theta_;
  hyp_.delta0 = theta_;
  hyp_.K0 = 1;
  hyp_.lambda = std::log(1 / theta_);
  hyp_.nu_s = theta_;
  hyp_.nu_u = 1 / theta_;
  hyp_.closing_c = 1 / theta_;
  hyp_.delta1 = hyp_.delta0 / (2 * hyp_.closing_c);
}

Sft Sft::full_shift(int alphabet, double theta) {
  return Sft(alphabet, std::vector<std::vector<int>>(static_cast<std::size_t>(alphabet),
                                                    std::vector<int>(static_cast<std::size_t>(alphabet), 1)),
             theta);
}

bool Sft::admissible(const Word& w, bool cyclic) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= alphabet_) return false;
    if (i + 1 < w.size() && !admissible(w[i], w[i + 1])) return false;
  }
  if (cyclic && !w.empty() && !admissible(w.back(), w.front())) return false;
  return true;
}

bool Sft::admissible(const SftPoint& x) const {
  if (!admissible(*x.left, true) || !admissible(*x.right, true)) return false;
  const long a = x.lo() - 1, b = x.hi() + 1;
  for (long i = a; i < b; ++i)
    if (!admissible(x.at(i), x.at(i + 1))) return false;
  return true;
}

SftPoint Sft::step(const SftPoint& x, long k) const {
  SftPoint y = x;
  y.offset += k;
  return y;
}

namespace {

// Smallest n >= 1 with x_{dn} != y_{dn}, or LONG_MAX. Where both points sit
// in periodic tails, one matching lcm period covers the whole stretch.
long first_mismatch(const SftPoint& x, const SftPoint& y, long d) {
  const long kr = std::max(x.hi(), y.hi()) + 1;  // both in right tails from here
  const long kl = std::min(x.lo(), y.lo()) - 1;  // both in left tails up to here
  const long pr = std::lcm(static_cast<long>(x.right->size()), static_cast<long>(y.right->size()));
  const long pl = std::lcm(static_cast<long>(x.left->size()), static_cast<long>(y.left->size()));
  int region = 0;
  long run = 0;
  for (long n = 1;; ++n) {
    const long k = d * n;
    if (x.at(k) != y.at(k)) return n;
    const int r = k >= kr ? 1 : k <= kl ? -1 : 0;
    if (r != region) {
      region = r;
      run = 0;
    }
    if (r == 0 || ++run < (r > 0 ? pr : pl)) continue;
    if (r == static_cast<int>(d)) return LONG_MAX;  // the tail runs on forever
    n = r > 0 ? -kr : kl;                           // skip to the end of the stretch
    region = 0;
    run = 0;
  }
}

}  // namespace

long Sft::agreement(const SftPoint& x, const SftPoint& y) const {
  if (x.at(0) != y.at(0)) return -1;
  const long n = std::min(first_mismatch(x, y, 1), first_mismatch(x, y, -1));
  return n == LONG_MAX ? LONG_MAX : n - 1;
}

bool Sft::agree_on(const SftPoint& x, const SftPoint& y, long n) const {
  for (long k = 0; k <= n; ++k)
    if (x.at(k) != y.at(k) || x.at(-k) != y.at(-k)) return false;
  return true;
}

bool Sft::equal(const SftPoint& x, const SftPoint& y) const { return agreement(x, y) == LONG_MAX; }

double Sft::distance(const SftPoint& x, const SftPoint& y) const {
  const long n = agreement(x, y);
  if (n == LONG_MAX) return 0;
  if (n < 0) return 1;
  return std::pow(theta_, static_cast<double>(n));
}

SftPoint Sft::bracket(const SftPoint& x, const SftPoint& y) const {
  const double d = distance(x, y);
  if (d > hyp_.delta0) {
    std::ostringstream os;
    os << "bracket needs d(x,y) <= delta0 = " << hyp_.delta0 << ", got " << d;
    throw Error(ErrorKind::precondition, os.str());
  }
  return splice(x, y, 1);
}

SftPoint Sft::splice(const SftPoint& x, const SftPoint& y, long j) const {
  if (!admissible(x.at(j - 1), y.at(j)))
    throw Error(ErrorKind::precondition, "splice junction is not an admissible transition");
  // The left tail of x keeps its phase when lo moves by multiples of |L|;
  // likewise the right tail of y.
  const long nl = static_cast<long>(x.left->size());
  const long nr = static_cast<long>(y.right->size());
  long lo = x.lo();
  while (lo > j - 1) lo -= nl;
  long right_start = y.hi() + 1;
  while (right_start < j) right_start += nr;
  Word center;
  center.reserve(static_cast<std::size_t>(right_start - lo));
  for (long i = lo; i < right_start; ++i) center.push_back(i < j ? x.at(i) : y.at(i));
  SftPoint z{x.left, std::make_shared<const Word>(std::move(center)), y.right, -lo};
  return normalize(z);
}

SftPoint Sft::normalize(const SftPoint& x) const {
  Word left = primitive_root(*x.left);
  Word right = primitive_root(*x.right);
  std::deque<Symbol> center(x.center->begin(), x.center->end());
  long c0 = x.lo();
  while (!center.empty() && center.front() == left.front()) {
    std::rotate(left.begin(), left.begin() + 1, left.end());
    center.pop_front();
    ++c0;
  }
  while (!center.empty() && center.back() == right.back()) {
    std::rotate(right.rbegin(), right.rbegin() + 1, right.rend());
    center.pop_back();
  }
  return make_sft_point(std::move(left), Word(center.begin(), center.end()), std::move(right), -c0);
}

std::vector<Word> Sft::words(int n) const {
  std::vector<Word> out;
  if (n <= 0) return out;
  for (int a = 0; a < alphabet_; ++a) out.push_back(Word{static_cast<Symbol>(a)});
  for (int len = 1; len < n; ++len) {
    std::vector<Word> next;
    for (const Word& w : out)
      for (int b = 0; b < alphabet_; ++b)
        if (admissible(w.back(), static_cast<Symbol>(b))) {
          Word v = w;
          v.push_back(static_cast<Symbol>(b));
          next.push_back(std::move(v));
        }
    out = std::move(next);
  }
  return out;
}

std::vector<Word> Sft::cyclic_words(long n, std::size_t cap) const {
  if (n < 1) throw Error(ErrorKind::precondition, "period must be >= 1");
  const std::uint64_t count = periodic_count(n);
  if (count > cap) {
    std::ostringstream os;
    os << "number of period-" << n << " words " << count << " exceeds enumeration cap " << cap;
    throw Error(ErrorKind::enumeration_cap, os.str());
  }
  std::vector<Word> out;
  out.reserve(count);
  Word w;
  // Depth-first in lexicographic order.
  auto rec = [&](auto&& self) -> void {
    if (static_cast<long>(w.size()) == n) {
      if (admissible(w.back(), w.front())) out.push_back(w);
      return;
    }
    for (int b = 0; b < alphabet_; ++b) {
      if (!w.empty() && !admissible(w.back(), static_cast<Symbol>(b))) continue;
      w.push_back(static_cast<Symbol>(b));
      self(self);
      w.pop_back();
    }
  };
  rec(rec);
  return out;
}

std::uint64_t Sft::periodic_count(long n) const {
  const std::size_t k = static_cast<std::size_t>(alphabet_);
  std::vector<std::vector<long double>> p(k, std::vector<long double>(k, 0)), t = p;
  for (std::size_t i = 0; i < k; ++i) {
    p[i][i] = 1;
    for (std::size_t j = 0; j < k; ++j) t[i][j] = transition_[i][j];
  }
  for (long m = 0; m < n; ++m) {
    std::vector<std::vector<long double>> r(k, std::vector<long double>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < k; ++l)
        for (std::size_t j = 0; j < k; ++j) r[i][j] += p[i][l] * t[l][j];
    p = std::move(r);
  }
  long double tr = 0;
  for (std::size_t i = 0; i < k; ++i) tr += p[i][i];
  return static_cast<std::uint64_t>(tr + 0.5L);
}

SftPoint Sft::closing_point(const SftPoint& x, long n) const {
  Word w(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = x.at(i);
  if (!admissible(w, true))
    throw Error(ErrorKind::precondition, "return word is not cyclically admissible");
  return periodic_sft_point(w);
}

Word Sft::connector(Symbol a, Symbol b) const {
  // Breadth-first search over symbols; returns the interior of a shortest path.
  std::vector<int> parent(static_cast<std::size_t>(alphabet_), -2);
  std::deque<int> queue;
  for (int c = 0; c < alphabet_; ++c) {
    if (!admissible(a, static_cast<Symbol>(c))) continue;
    if (c == b) return {};
    if (parent[c] == -2) {
      parent[c] = -1;
      queue.push_back(c);
    }
  }
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    for (int d = 0; d < alphabet_; ++d) {
      if (!admissible(static_cast<Symbol>(c), static_cast<Symbol>(d)) || parent[d] != -2) continue;
      parent[d] = c;
      if (d == b) {
        Word path;
        for (int v = c; v != -1; v = parent[v]) path.push_back(static_cast<Symbol>(v));
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(d);
    }
  }
  throw Error(ErrorKind::reducible, "no admissible path between symbols");
}

SftPoint Sft::random_point(RandomStream& rng, long length) const {
  auto walk = [&](Symbol start, long len) {
    Word w{start};
    while (static_cast<long>(w.size()) < len) {
      std::vector<Symbol> next;
      for (int b = 0; b < alphabet_; ++b)
        if (admissible(w.back(), static_cast<Symbol>(b))) next.push_back(static_cast<Symbol>(b));
      w.push_back(next[rng.below(next.size())]);
    }
    return w;
  };
  auto cycle = [&]() {
    Word w = walk(static_cast<Symbol>(rng.below(static_cast<std::uint64_t>(alphabet_))), 3);
    Word back = connector(w.back(), w.front());
    w.insert(w.end(), back.begin(), back.end());
    return w;
  };
  Word left = cycle();
  Word right = cycle();
  std::vector<Symbol> successors;
  for (int b = 0; b < alphabet_; ++b)
    if (admissible(left.back(), static_cast<Symbol>(b))) successors.push_back(static_cast<Symbol>(b));
  const Symbol start = successors[rng.below(successors.size())];
  Word center = walk(start, std::max(1L, length));
  Word link = connector(center.back(), right.front());
  center.insert(center.end(), link.begin(), link.end());
  const long offset = length / 2;
  return make_sft_point(std::move(left), std::move(center), std::move(right), offset);
}

std::uint64_t Sft::cylinder_index(const SftPoint& x, long lo, long hi) const {
  std::uint64_t idx = 0;
  for (long i = lo; i <= hi; ++i) idx = idx * static_cast<std::uint64_t>(alphabet_) + x.at(i);
  return idx;
}

}  // namespace livsic
