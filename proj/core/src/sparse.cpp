#include "spcg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "spcg/errors.hpp"

namespace spcg {

const char* rule_name(Rule rule) {
  switch (rule) {
    case Rule::kArrayLength: return "array-length";
    case Rule::kOffsetsStart: return "offsets-start";
    case Rule::kOffsetsMonotone: return "offsets-monotone";
    case Rule::kOffsetsEnd: return "offsets-end";
    case Rule::kColumnRange: return "column-range";
    case Rule::kColumnOrder: return "column-order";
    case Rule::kUpperEntry: return "upper-entry";
    case Rule::kMissingDiagonal: return "missing-diagonal";
  }
  return "unknown";
}

std::string ValidationReport::describe() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i) os << "; ";
    os << rule_name(v.rule) << " (row " << v.row << ", position " << v.position << ")";
  }
  return os.str();
}

template <typename T>
ValidationReport validate_csr(const CsrArrays<T>& a) {
  ValidationReport report;
  auto flag = [&](Rule r, std::size_t row, std::size_t pos) {
    report.violations.push_back({r, row, pos});
  };

  if (a.row_start.size() != a.n + 1) {
    flag(Rule::kArrayLength, 0, a.row_start.size());
    return report;
  }
  if (a.col_idx.size() != a.values.size()) {
    flag(Rule::kArrayLength, 0, a.col_idx.size());
    return report;
  }
  const std::size_t nnz = a.values.size();
  if (a.row_start[0] != 0) flag(Rule::kOffsetsStart, 0, 0);
  for (std::size_t i = 0; i < a.n; ++i) {
    if (a.row_start[i + 1] < a.row_start[i]) flag(Rule::kOffsetsMonotone, i, i + 1);
  }
  if (a.row_start[a.n] != nnz) flag(Rule::kOffsetsEnd, a.n, a.n);
  if (!report.ok()) return report;  // row ranges are meaningless past this point

  for (std::size_t i = 0; i < a.n; ++i) {
    for (offset_type k = a.row_start[i]; k < a.row_start[i + 1]; ++k) {
      if (a.col_idx[k] >= a.n) flag(Rule::kColumnRange, i, k);
      if (k > a.row_start[i] && a.col_idx[k] <= a.col_idx[k - 1]) flag(Rule::kColumnOrder, i, k);
    }
  }
  return report;
}

template <typename T>
ValidationReport validate_sym_half(const CsrArrays<T>& a) {
  ValidationReport report = validate_csr(a);
  if (!report.ok()) return report;
  for (std::size_t i = 0; i < a.n; ++i) {
    const offset_type begin = a.row_start[i];
    const offset_type end = a.row_start[i + 1];
    for (offset_type k = begin; k < end; ++k) {
      if (a.col_idx[k] > i) report.violations.push_back({Rule::kUpperEntry, i, k});
    }
    if (end == begin || a.col_idx[end - 1] != i) {
      report.violations.push_back({Rule::kMissingDiagonal, i, end});
    }
  }
  return report;
}

template <typename T>
CsrMatrix<T>::CsrMatrix(CsrArrays<T> arrays) : arrays_(std::move(arrays)) {
  const auto report = validate_csr(arrays_);
  if (!report.ok()) throw ConstructionError("invalid CSR matrix: " + report.describe());
}

template <typename T>
T CsrMatrix<T>::at(std::size_t row, std::size_t col) const {
  if (row >= n() || col >= n()) throw DimensionError("matrix index out of range");
  const auto first = arrays_.col_idx.begin() + static_cast<std::ptrdiff_t>(arrays_.row_start[row]);
  const auto last = arrays_.col_idx.begin() + static_cast<std::ptrdiff_t>(arrays_.row_start[row + 1]);
  const auto it = std::lower_bound(first, last, static_cast<index_type>(col));
  if (it == last || *it != col) return T{};
  return arrays_.values[static_cast<std::size_t>(it - arrays_.col_idx.begin())];
}

template <typename T>
SymHalfMatrix<T>::SymHalfMatrix(CsrArrays<T> arrays) : arrays_(std::move(arrays)) {
  const auto report = validate_sym_half(arrays_);
  for (const auto& v : report.violations) {
    if (v.rule == Rule::kMissingDiagonal) {
      diag_present_ = false;
    } else {
      throw ConstructionError("invalid symmetric half matrix: " + report.describe());
    }
  }
}

template <typename T>
CsrMatrix<T> build_csr_from_triplets(std::span<const Triplet<T>> triplets, std::size_t n,
                                     TripletOptions options) {
  if (n > std::numeric_limits<index_type>::max()) {
    throw ConstructionError("dimension " + std::to_string(n) + " exceeds the index range");
  }
  for (std::size_t t = 0; t < triplets.size(); ++t) {
    const auto& e = triplets[t];
    if (e.row >= n || e.col >= n) {
      std::ostringstream os;
      os << "triplet " << t << " (" << e.row << ", " << e.col << ", " << e.value
         << ") is outside a " << n << "x" << n << " matrix";
      throw ConstructionError(os.str());
    }
  }

  // Counting sort by row, then sort each row by column. Stable sort keeps
  // duplicates in input order so their sum is reproducible.
  std::vector<offset_type> count(n + 1, 0);
  for (const auto& e : triplets) ++count[e.row + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::size_t> order(triplets.size());
  {
    std::vector<offset_type> cursor(count.begin(), count.end() - 1);
    for (std::size_t t = 0; t < triplets.size(); ++t) order[cursor[triplets[t].row]++] = t;
  }

  CsrArrays<T> out;
  out.n = n;
  out.row_start.assign(n + 1, 0);
  out.col_idx.reserve(triplets.size());
  out.values.reserve(triplets.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto first = order.begin() + static_cast<std::ptrdiff_t>(count[i]);
    const auto last = order.begin() + static_cast<std::ptrdiff_t>(count[i + 1]);
    std::stable_sort(first, last, [&](std::size_t a, std::size_t b) {
      return triplets[a].col < triplets[b].col;
    });
    for (auto it = first; it != last;) {
      const index_type col = triplets[*it].col;
      T sum = triplets[*it].value;
      for (++it; it != last && triplets[*it].col == col; ++it) sum += triplets[*it].value;
      if (options.drop_zeros && sum == T{}) continue;
      out.col_idx.push_back(col);
      out.values.push_back(sum);
    }
    out.row_start[i + 1] = out.values.size();
  }
  return CsrMatrix<T>(std::move(out));
}

template <typename T>
std::optional<std::pair<std::size_t, std::size_t>> first_asymmetry(const CsrMatrix<T>& m,
                                                                   double tol) {
  const auto rs = m.row_start();
  const auto ci = m.col_idx();
  const auto vals = m.values();
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (offset_type k = rs[i]; k < rs[i + 1]; ++k) {
      const std::size_t j = ci[k];
      const double v = static_cast<double>(vals[k]);
      const double w = (j == i) ? v : static_cast<double>(m.at(j, i));
      if (!(std::abs(v - w) <= tol * std::max(1.0, std::abs(v)))) {
        return std::pair{i, j};
      }
    }
  }
  return std::nullopt;
}

template <typename T>
SymHalfMatrix<T> extract_lower(const CsrMatrix<T>& m, double tol) {
  if (const auto bad = first_asymmetry(m, tol)) {
    throw SymmetryError("matrix is not symmetric: entry (" + std::to_string(bad->first) + ", " +
                        std::to_string(bad->second) + ") differs from its mirror");
  }
  const auto rs = m.row_start();
  const auto ci = m.col_idx();
  const auto vals = m.values();
  CsrArrays<T> out;
  out.n = m.n();
  out.row_start.assign(m.n() + 1, 0);
  out.col_idx.reserve((m.nnz() + m.n()) / 2);
  out.values.reserve((m.nnz() + m.n()) / 2);
  for (std::size_t i = 0; i < m.n(); ++i) {
    bool diagonal = false;
    for (offset_type k = rs[i]; k < rs[i + 1] && ci[k] <= i; ++k) {
      out.col_idx.push_back(ci[k]);
      out.values.push_back(vals[k]);
      diagonal = (ci[k] == i);
    }
    if (!diagonal) {
      throw SymmetryError("row " + std::to_string(i) + " has no stored diagonal entry");
    }
    out.row_start[i + 1] = out.values.size();
  }
  return SymHalfMatrix<T>(std::move(out));
}

template <typename T>
CsrMatrix<T> expand_symmetric(const SymHalfMatrix<T>& s) {
  const std::size_t n = s.n();
  const auto rs = s.row_start();
  const auto ci = s.col_idx();
  const auto vals = s.values();

  // Row i of the full matrix = stored row i of L+D, then column i of L
  // transposed (entries (j, i) with j > i, visited in increasing j).
  std::vector<offset_type> len(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    len[i] += rs[i + 1] - rs[i];
    for (offset_type k = rs[i]; k < rs[i + 1]; ++k) {
      if (ci[k] < i) ++len[ci[k]];
    }
  }
  CsrArrays<T> out;
  out.n = n;
  out.row_start.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) out.row_start[i + 1] = out.row_start[i] + len[i];
  out.col_idx.resize(out.row_start[n]);
  out.values.resize(out.row_start[n]);

  std::vector<offset_type> cursor(out.row_start.begin(), out.row_start.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (offset_type k = rs[i]; k < rs[i + 1]; ++k) {
      out.col_idx[cursor[i]] = ci[k];
      out.values[cursor[i]++] = vals[k];
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (offset_type k = rs[j]; k < rs[j + 1]; ++k) {
      const std::size_t c = ci[k];
      if (c < j) {
        out.col_idx[cursor[c]] = static_cast<index_type>(j);
        out.values[cursor[c]++] = vals[k];
      }
    }
  }
  return CsrMatrix<T>(std::move(out));
}

#define SPCG_INSTANTIATE(T)                                                                    \
  template ValidationReport validate_csr(const CsrArrays<T>&);                                 \
  template ValidationReport validate_sym_half(const CsrArrays<T>&);                            \
  template class CsrMatrix<T>;                                                                 \
  template class SymHalfMatrix<T>;                                                             \
  template CsrMatrix<T> build_csr_from_triplets(std::span<const Triplet<T>>, std::size_t,      \
                                                TripletOptions);                               \
  template std::optional<std::pair<std::size_t, std::size_t>> first_asymmetry(                 \
      const CsrMatrix<T>&, double);                                                            \
  template SymHalfMatrix<T> extract_lower(const CsrMatrix<T>&, double);                        \
  template CsrMatrix<T> expand_symmetric(const SymHalfMatrix<T>&);

SPCG_INSTANTIATE(float)
SPCG_INSTANTIATE(double)

#undef SPCG_INSTANTIATE

}  // namespace spcg
