#include "spcg_cli/bench_report.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace spcg::cli {

std::vector<std::size_t> BenchReport::worker_counts() const {
  std::vector<std::size_t> out;
  for (const auto& row : rows) {
    if (std::find(out.begin(), out.end(), row.workers) == out.end()) out.push_back(row.workers);
  }
  return out;
}

const BenchRow* BenchReport::find(const std::string& op, std::size_t workers,
                                  const std::string& storage,
                                  const std::string& accumulation) const {
  for (const auto& row : rows) {
    if (row.op == op && row.workers == workers && row.storage == storage &&
        row.accumulation == accumulation) {
      return &row;
    }
  }
  return nullptr;
}

namespace {

std::string fixed3(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

std::string speedup_text(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v << "x";
  return os.str();
}

std::string label(const BenchRow& row) {
  std::string s = row.op;
  if (row.op == kOpCg) s += " (" + row.storage + ")";
  if (row.op == kOpSpmvSym) s += " " + row.accumulation;
  return s;
}

// Shortest representation that parses back to the same double.
std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad number '" + s + "' in benchmark CSV");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad integer '" + s + "' in benchmark CSV");
  }
  return v;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

constexpr const char* kCsvHeader =
    "op,storage,accumulation,workers,time_ms,speedup,iterations,final_residual,converged,"
    "problem,n,nnz,input_storage,stored_full,stored_sym,precision,cg_accumulation,reps,"
    "load_ms,checksum";
constexpr std::size_t kCsvColumns = 20;

}  // namespace

std::string to_text(const BenchReport& r) {
  std::ostringstream os;
  const double per_row = r.n ? static_cast<double>(r.nnz) / static_cast<double>(r.n) : 0.0;
  os << "problem: " << r.problem << "\n"
     << "matrix: n=" << r.n << " nnz=" << r.nnz << " (" << std::fixed << std::setprecision(2)
     << per_row << " nnz/row), input storage " << r.input_storage << "\n"
     << "stored entries: full=" << r.stored_full << " sym=" << r.stored_sym << "\n"
     << "precision: " << r.precision << ", reps: " << r.reps
     << " (median, 1 warm-up), CG sym accumulation: " << r.cg_accumulation << "\n"
     << "load time: " << fixed3(r.load_ms) << "ms (excluded from all timings below)\n\n";

  const auto workers = r.worker_counts();
  // Row order follows first appearance.
  std::vector<const BenchRow*> kinds;
  for (const auto& row : r.rows) {
    const bool seen = std::any_of(kinds.begin(), kinds.end(), [&](const BenchRow* k) {
      return k->op == row.op && k->storage == row.storage && k->accumulation == row.accumulation;
    });
    if (!seen) kinds.push_back(&row);
  }

  constexpr int kLabel = 24;
  constexpr int kCell = 28;
  os << std::left << std::setw(kLabel) << "Operation";
  for (const auto w : workers) os << std::setw(kCell) << ("workers=" + std::to_string(w));
  os << "\n" << std::string(kLabel + kCell * workers.size(), '-') << "\n";
  for (const BenchRow* kind : kinds) {
    os << std::setw(kLabel) << label(*kind);
    for (const auto w : workers) {
      const BenchRow* row = r.find(kind->op, w, kind->storage, kind->accumulation);
      std::string cell = "-";
      if (row) {
        cell = fixed3(row->time_ms) + "ms";
        if (row->iterations) cell += "/" + std::to_string(*row->iterations);
        cell += " (" + speedup_text(row->speedup) + ")";
        if (row->converged && !*row->converged) cell += " !conv";
      }
      os << std::setw(kCell) << cell;
    }
    os << "\n";
  }
  return os.str();
}

std::string to_csv(const BenchReport& r) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& row : r.rows) {
    os << row.op << ',' << row.storage << ',' << row.accumulation << ',' << row.workers << ','
       << exact(row.time_ms) << ',' << exact(row.speedup) << ','
       << (row.iterations ? std::to_string(*row.iterations) : "") << ','
       << (row.final_residual ? exact(*row.final_residual) : "") << ','
       << (row.converged ? (*row.converged ? "true" : "false") : "") << ',' << quote(r.problem)
       << ',' << r.n << ',' << r.nnz << ',' << r.input_storage << ',' << r.stored_full << ','
       << r.stored_sym << ',' << r.precision << ',' << r.cg_accumulation << ',' << r.reps << ','
       << exact(r.load_ms) << ',' << r.checksum << "\n";
  }
  return os.str();
}

BenchReport report_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("benchmark CSV header not recognised");
  }
  BenchReport r;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != kCsvColumns) throw std::runtime_error("benchmark CSV row has wrong width");
    BenchRow row;
    row.op = f[0];
    row.storage = f[1];
    row.accumulation = f[2];
    row.workers = parse_int<std::size_t>(f[3]);
    row.time_ms = parse_double(f[4]);
    row.speedup = parse_double(f[5]);
    if (!f[6].empty()) row.iterations = parse_int<std::size_t>(f[6]);
    if (!f[7].empty()) row.final_residual = parse_double(f[7]);
    if (!f[8].empty()) row.converged = (f[8] == "true");
    r.rows.push_back(row);
    if (first) {
      r.problem = f[9];
      r.n = parse_int<std::size_t>(f[10]);
      r.nnz = parse_int<std::size_t>(f[11]);
      r.input_storage = f[12];
      r.stored_full = parse_int<std::size_t>(f[13]);
      r.stored_sym = parse_int<std::size_t>(f[14]);
      r.precision = f[15];
      r.cg_accumulation = f[16];
      r.reps = parse_int<std::size_t>(f[17]);
      r.load_ms = parse_double(f[18]);
      r.checksum = parse_int<std::uint64_t>(f[19]);
      first = false;
    }
  }
  return r;
}

std::string to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["problem"] = r.problem;
  j["matrix"] = {{"n", r.n},
                 {"nnz", r.nnz},
                 {"input_storage", r.input_storage},
                 {"stored_full", r.stored_full},
                 {"stored_sym", r.stored_sym}};
  j["environment"] = {{"precision", r.precision},
                      {"cg_accumulation", r.cg_accumulation},
                      {"reps", r.reps},
                      {"workers", r.worker_counts()}};
  j["load_ms"] = r.load_ms;
  j["checksum"] = r.checksum;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o = {{"op", row.op},
                                {"storage", row.storage},
                                {"accumulation", row.accumulation},
                                {"workers", row.workers},
                                {"time_ms", row.time_ms},
                                {"speedup", row.speedup}};
    if (row.iterations) o["iterations"] = *row.iterations;
    if (row.final_residual) o["final_residual"] = *row.final_residual;
    if (row.converged) o["converged"] = *row.converged;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

BenchReport report_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    BenchReport r;
    r.problem = j.at("problem").get<std::string>();
    const auto& m = j.at("matrix");
    r.n = m.at("n").get<std::size_t>();
    r.nnz = m.at("nnz").get<std::size_t>();
    r.input_storage = m.at("input_storage").get<std::string>();
    r.stored_full = m.at("stored_full").get<std::size_t>();
    r.stored_sym = m.at("stored_sym").get<std::size_t>();
    const auto& env = j.at("environment");
    r.precision = env.at("precision").get<std::string>();
    r.cg_accumulation = env.at("cg_accumulation").get<std::string>();
    r.reps = env.at("reps").get<std::size_t>();
    r.load_ms = j.at("load_ms").get<double>();
    r.checksum = j.at("checksum").get<std::uint64_t>();
    for (const auto& o : j.at("rows")) {
      BenchRow row;
      row.op = o.at("op").get<std::string>();
      row.storage = o.at("storage").get<std::string>();
      row.accumulation = o.at("accumulation").get<std::string>();
      row.workers = o.at("workers").get<std::size_t>();
      row.time_ms = o.at("time_ms").get<double>();
      row.speedup = o.at("speedup").get<double>();
      if (o.contains("iterations")) row.iterations = o["iterations"].get<std::size_t>();
      if (o.contains("final_residual")) row.final_residual = o["final_residual"].get<double>();
      if (o.contains("converged")) row.converged = o["converged"].get<bool>();
      r.rows.push_back(std::move(row));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed benchmark JSON: ") + e.what());
  }
}

}  // namespace spcg::cli
