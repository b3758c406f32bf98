#include "bcpar/fm.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace bcpar {

std::string_view fm_verdict_name(FmVerdict v) {
  return v == FmVerdict::Infeasible ? "infeasible" : "feasible_rational";
}

int InequalitySystem::add_var(std::string name) {
  vars.push_back(std::move(name));
  for (auto& r : rows) r.coeffs.resize(vars.size(), 0);
  return static_cast<int>(vars.size()) - 1;
}

int InequalitySystem::var_index(const std::string& name) const {
  auto it = std::find(vars.begin(), vars.end(), name);
  return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
}

void InequalitySystem::add_le(std::vector<std::int64_t> coeffs, std::int64_t bound) {
  coeffs.resize(vars.size(), 0);
  rows.push_back({std::move(coeffs), bound, false});
}

void InequalitySystem::add_ge(std::vector<std::int64_t> coeffs, std::int64_t bound) {
  for (auto& c : coeffs) c = -c;
  add_le(std::move(coeffs), -bound);
}

void InequalitySystem::add_eq(std::vector<std::int64_t> coeffs, std::int64_t bound) {
  coeffs.resize(vars.size(), 0);
  rows.push_back({std::move(coeffs), bound, true});
}

std::string InequalitySystem::to_string() const {
  std::ostringstream os;
  for (const auto& r : rows) {
    bool any = false;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) {
      auto c = r.coeffs[i];
      if (c == 0) continue;
      os << (c < 0 ? (any ? " - " : "-") : (any ? " + " : ""));
      if (c != 1 && c != -1) os << (c < 0 ? -c : c) << "*";
      os << vars[i];
      any = true;
    }
    if (!any) os << "0";
    os << (r.equality ? " = " : " <= ") << r.bound << "\n";
  }
  return os.str();
}

namespace {

using i128 = __int128;

constexpr i128 kLimit = static_cast<i128>(INT64_MAX);

struct Overflow {};

std::int64_t narrow(i128 v) {
  if (v > kLimit || v < -kLimit) throw Overflow{};
  return static_cast<std::int64_t>(v);
}

/// Divides the row by the gcd of all its terms; exact, so the rational
/// solution set is unchanged.
void normalize(LinearRow& r) {
  std::int64_t g = 0;
  for (auto c : r.coeffs) g = std::gcd(g, c < 0 ? -c : c);
  if (g == 0) return;
  g = std::gcd(g, r.bound < 0 ? -r.bound : r.bound);
  if (g <= 1) return;
  for (auto& c : r.coeffs) c /= g;
  r.bound /= g;
}

bool is_constant(const LinearRow& r) {
  return std::all_of(r.coeffs.begin(), r.coeffs.end(), [](auto c) { return c == 0; });
}

/// false when a constant row is contradictory
bool constant_ok(const LinearRow& r) { return r.equality ? r.bound == 0 : r.bound >= 0; }

/// m1*a + m2*b with m1, m2 > 0 for inequalities.
LinearRow combine(const LinearRow& a, std::int64_t m1, const LinearRow& b, std::int64_t m2, bool equality) {
  LinearRow out;
  out.coeffs.resize(a.coeffs.size());
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    out.coeffs[i] = narrow(static_cast<i128>(a.coeffs[i]) * m1 + static_cast<i128>(b.coeffs[i]) * m2);
  out.bound = narrow(static_cast<i128>(a.bound) * m1 + static_cast<i128>(b.bound) * m2);
  out.equality = equality;
  normalize(out);
  return out;
}

struct RowLess {
  bool operator()(const LinearRow& a, const LinearRow& b) const {
    if (a.equality != b.equality) return a.equality < b.equality;
    if (a.coeffs != b.coeffs) return a.coeffs < b.coeffs;
    return a.bound < b.bound;
  }
};

/// Removes duplicates and, among inequalities with identical coefficients,
/// keeps only the tightest bound.
std::optional<std::vector<LinearRow>> tidy(std::vector<LinearRow> rows) {
  std::vector<LinearRow> out;
  std::sort(rows.begin(), rows.end(), RowLess{});
  for (auto& r : rows) {
    if (is_constant(r)) {
      if (!constant_ok(r)) return std::nullopt;
      continue;
    }
    if (!out.empty() && !r.equality && !out.back().equality && out.back().coeffs == r.coeffs) {
      out.back().bound = std::min(out.back().bound, r.bound);
      continue;
    }
    if (!out.empty() && out.back() == r) continue;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

FmResult fm_eliminate(const InequalitySystem& sys, const FmOptions& opts) {
  FmResult res;
  const std::size_t nvars = sys.vars.size();
  std::vector<LinearRow> rows = sys.rows;
  for (auto& r : rows) {
    r.coeffs.resize(nvars, 0);
    normalize(r);
  }
  res.peak_rows = rows.size();
  try {
    auto t = tidy(std::move(rows));
    if (!t) {
      res.verdict = FmVerdict::Infeasible;
      return res;
    }
    rows = std::move(*t);

    // equalities: substitute one variable away per equality row
    for (;;) {
      auto eq = std::find_if(rows.begin(), rows.end(), [](const LinearRow& r) { return r.equality; });
      if (eq == rows.end()) break;
      LinearRow e = *eq;
      rows.erase(eq);
      std::size_t v = 0;
      std::int64_t best = 0;
      for (std::size_t i = 0; i < nvars; ++i) {
        auto c = e.coeffs[i] < 0 ? -e.coeffs[i] : e.coeffs[i];
        if (c != 0 && (best == 0 || c < best)) best = c, v = i;
      }
      std::int64_t ev = e.coeffs[v];
      for (auto& r : rows) {
        std::int64_t rv = r.coeffs[v];
        if (rv == 0) continue;
        // |ev| * r - sign(ev) * rv * e eliminates v and keeps r's direction
        std::int64_t m1 = ev < 0 ? -ev : ev;
        std::int64_t m2 = narrow(ev < 0 ? static_cast<i128>(rv) : -static_cast<i128>(rv));
        r = combine(r, m1, e, m2, r.equality);
      }
      t = tidy(std::move(rows));
      if (!t) {
        res.verdict = FmVerdict::Infeasible;
        return res;
      }
      rows = std::move(*t);
    }

    std::vector<bool> done(nvars, false);
    std::size_t next_in_order = 0;
    for (std::size_t step = 0; step < nvars; ++step) {
      // pick the variable to eliminate
      int v = -1;
      if (!opts.order.empty()) {
        while (next_in_order < opts.order.size() &&
               (opts.order[next_in_order] < 0 || static_cast<std::size_t>(opts.order[next_in_order]) >= nvars ||
                done[static_cast<std::size_t>(opts.order[next_in_order])]))
          ++next_in_order;
        if (next_in_order < opts.order.size()) v = opts.order[next_in_order++];
      }
      if (v < 0) {
        std::size_t best = SIZE_MAX;
        for (std::size_t i = 0; i < nvars; ++i) {
          if (done[i]) continue;
          std::size_t up = 0, lo = 0;
          for (const auto& r : rows) {
            if (r.coeffs[i] > 0) ++up;
            else if (r.coeffs[i] < 0) ++lo;
          }
          std::size_t cost = up * lo;
          if (cost < best || (cost == best && static_cast<int>(i) < v)) best = cost, v = static_cast<int>(i);
        }
      }
      if (v < 0) break;
      done[static_cast<std::size_t>(v)] = true;
      auto vi = static_cast<std::size_t>(v);

      std::vector<LinearRow> upper, lower, next;
      for (auto& r : rows) {
        if (r.coeffs[vi] > 0) upper.push_back(std::move(r));
        else if (r.coeffs[vi] < 0) lower.push_back(std::move(r));
        else next.push_back(std::move(r));
      }
      if (next.size() + upper.size() * lower.size() > opts.row_cap) {
        res.capped = true;
        res.peak_rows = std::max(res.peak_rows, next.size() + upper.size() * lower.size());
        return res;
      }
      for (const auto& u : upper) {
        for (const auto& l : lower) {
          next.push_back(combine(u, -l.coeffs[vi], l, u.coeffs[vi], false));
        }
      }
      res.peak_rows = std::max(res.peak_rows, next.size());
      t = tidy(std::move(next));
      if (!t) {
        res.verdict = FmVerdict::Infeasible;
        return res;
      }
      rows = std::move(*t);
    }
  } catch (const Overflow&) {
    res.capped = true;
    res.verdict = FmVerdict::FeasibleRational;
    return res;
  }
  res.verdict = FmVerdict::FeasibleRational;
  return res;
}

}  // namespace bcpar
