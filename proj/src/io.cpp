#include "coxgp/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "coxgp/error.hpp"

namespace coxgp {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error("csv: malformed number '" + std::string(text) + "'");
  }
  return value;
}

std::size_t parse_index(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  std::size_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error("csv: malformed index '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

namespace {

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

std::string header_row(std::string_view first, std::string_view prefix, std::size_t count) {
  std::string h(first);
  for (std::size_t k = 1; k <= count; ++k) h += "," + std::string(prefix) + std::to_string(k);
  return h;
}

void expect_header(const std::string& line, const std::string& expected, const char* what) {
  std::string trimmed = line;
  while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) trimmed.pop_back();
  if (trimmed != expected) throw Error(std::string(what) + ": expected header '" + expected + "', got '" + trimmed + "'");
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split_csv_line(text)) out.push_back(parse_double(part));
  return out;
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += format_double(v[k]);
  }
  return s;
}

}  // namespace

void write_points_csv(std::ostream& out, std::span<const PointPattern> patterns) {
  const std::size_t D = patterns.empty() ? 2 : patterns.front().dim();
  out << header_row("replicate", "x", D) << '\n';
  for (std::size_t r = 0; r < patterns.size(); ++r) {
    for (std::size_t k = 0; k < patterns[r].size(); ++k) {
      out << r;
      for (double x : patterns[r].point(k)) out << ',' << format_double(x);
      out << '\n';
    }
  }
}

void write_points_csv(std::ostream& out, const Dataset& dataset) {
  std::vector<PointPattern> patterns;
  for (const auto& rep : dataset.replicates()) patterns.push_back(rep.pattern);
  write_points_csv(out, patterns);
}

std::vector<PointPattern> read_points_csv(std::istream& in, const Window& window, std::size_t replicates) {
  std::string line;
  if (!std::getline(in, line)) throw Error("points csv: missing header");
  const std::size_t D = window.dim();
  expect_header(line, header_row("replicate", "x", D), "points csv");
  std::vector<PointPattern> patterns(replicates, PointPattern(window));
  std::size_t row = 1;
  std::vector<double> x(D);
  while (std::getline(in, line)) {
    ++row;
    if (blank(line)) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != D + 1) throw Error("points csv: row " + std::to_string(row) + " has the wrong column count");
    const std::size_t r = parse_index(cells[0]);
    if (r >= replicates) throw Error("points csv: row " + std::to_string(row) + " names an unknown replicate");
    for (std::size_t k = 0; k < D; ++k) x[k] = parse_double(cells[k + 1]);
    if (!window.contains(x)) throw Error("points csv: row " + std::to_string(row) + " lies outside the window");
    patterns[r].add(x);
  }
  return patterns;
}

void write_raster_csv(std::ostream& out, std::span<const RawField> fields, bool normalized) {
  require(!fields.empty(), "raster csv: no fields");
  const FieldGrid& grid = fields.front().grid;
  const std::size_t d = fields.front().dim;
  for (const auto& f : fields) require(f.grid == grid && f.dim == d, "raster csv: fields do not share a grid");
  const std::size_t D = grid.dim();
  out << "# dim=" << d;
  for (std::size_t k = 0; k < D; ++k) out << " axis_" << k + 1 << '=' << grid.counts[k];
  out << " lower=" << join(grid.window.lower()) << " upper=" << join(grid.window.upper())
      << " normalized=" << (normalized ? 1 : 0) << '\n';
  out << header_row("replicate", "i", D);
  for (std::size_t j = 1; j <= d; ++j) out << ",z" << j;
  out << '\n';
  std::vector<std::size_t> idx(D);
  for (std::size_t r = 0; r < fields.size(); ++r) {
    for (std::size_t node = 0; node < grid.size(); ++node) {
      std::size_t rest = node;
      for (std::size_t k = D; k-- > 0;) {
        idx[k] = rest % grid.counts[k];
        rest /= grid.counts[k];
      }
      out << r;
      for (auto i : idx) out << ',' << i;
      for (std::size_t j = 0; j < d; ++j) out << ',' << format_double(fields[r].values[node * d + j]);
      out << '\n';
    }
  }
}

void write_raster_csv(std::ostream& out, std::span<const CovariateField> fields) {
  std::vector<RawField> raw;
  for (const auto& f : fields) raw.push_back(RawField{f.grid(), f.dim(), f.values()});
  write_raster_csv(out, raw, true);
}

Raster read_raster_csv(std::istream& in) {
  std::map<std::string, std::string> meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '#') break;
    std::istringstream tokens(line.substr(1));
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw Error("raster csv: malformed header token '" + tok + "'");
      meta[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  for (const char* key : {"dim", "lower", "upper"}) {
    if (!meta.count(key)) throw Error(std::string("raster csv: header lacks '") + key + "'");
  }
  const std::size_t d = parse_index(meta["dim"]);
  require(d >= 1, "raster csv: dim must be >= 1");
  const std::vector<double> lower = parse_list(meta["lower"]);
  const std::vector<double> upper = parse_list(meta["upper"]);
  require(lower.size() == upper.size(), "raster csv: lower/upper dimension mismatch");
  const std::size_t D = lower.size();
  std::vector<std::size_t> counts(D);
  for (std::size_t k = 0; k < D; ++k) {
    const std::string key = "axis_" + std::to_string(k + 1);
    if (!meta.count(key)) throw Error("raster csv: header lacks '" + key + "'");
    counts[k] = parse_index(meta[key]);
  }
  bool normalized = false;
  if (meta.count("normalized")) normalized = parse_index(meta["normalized"]) != 0;
  Raster raster{FieldGrid(Window(lower, upper), counts), d, normalized, {}};

  std::string expected = header_row("replicate", "i", D);
  for (std::size_t j = 1; j <= d; ++j) expected += ",z" + std::to_string(j);
  expect_header(line, expected, "raster csv");

  const std::size_t nodes = raster.grid.size();
  std::vector<std::size_t> filled;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (blank(line)) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 1 + D + d) throw Error("raster csv: row " + std::to_string(row) + " has the wrong column count");
    const std::size_t r = parse_index(cells[0]);
    while (raster.fields.size() <= r) {
      raster.fields.push_back(RawField{raster.grid, d, std::vector<double>(nodes * d, 0.0)});
      filled.push_back(0);
    }
    if (filled[r] >= nodes) throw Error("raster csv: replicate " + std::to_string(r) + " has too many rows");
    std::size_t node = 0;
    for (std::size_t k = 0; k < D; ++k) {
      const std::size_t i = parse_index(cells[1 + k]);
      if (i >= counts[k]) throw Error("raster csv: row " + std::to_string(row) + " index outside the grid");
      node = node * counts[k] + i;
    }
    if (node != filled[r]) throw Error("raster csv: row " + std::to_string(row) + " is out of row-major order");
    for (std::size_t j = 0; j < d; ++j) {
      const double v = parse_double(cells[1 + D + j]);
      if (!std::isfinite(v)) throw Error("raster csv: non-finite value at row " + std::to_string(row));
      raster.fields[r].values[node * d + j] = v;
    }
    ++filled[r];
  }
  for (std::size_t r = 0; r < filled.size(); ++r) {
    if (filled[r] != nodes) throw Error("raster csv: replicate " + std::to_string(r) + " is incomplete");
  }
  return raster;
}

Dataset load_dataset(std::istream& points, std::istream& raster_in, Preprocess mode) {
  Raster raster = read_raster_csv(raster_in);
  require(!raster.fields.empty(), "load_dataset: raster file holds no replicates");
  const std::vector<CovariateField> fields = preprocess_fields(raster.fields, raster.normalized ? Preprocess::None : mode);
  std::vector<PointPattern> patterns = read_points_csv(points, raster.grid.window, fields.size());
  std::vector<Replicate> reps;
  for (std::size_t r = 0; r < fields.size(); ++r) reps.push_back(Replicate{std::move(patterns[r]), fields[r]});
  return Dataset(std::move(reps));
}

Dataset load_dataset(const fs::path& points, const fs::path& raster, Preprocess mode) {
  std::ifstream p(points);
  if (!p) throw Error("cannot open " + points.string());
  std::ifstream r(raster);
  if (!r) throw Error("cannot open " + raster.string());
  return load_dataset(p, r, mode);
}

void save_dataset(const fs::path& points, const fs::path& raster, const Dataset& dataset) {
  std::ostringstream p;
  write_points_csv(p, dataset);
  std::vector<CovariateField> fields;
  for (const auto& rep : dataset.replicates()) fields.push_back(rep.field);
  std::ostringstream r;
  write_raster_csv(r, fields);
  write_text_file(points, p.str());
  write_text_file(raster, r.str());
}

void write_trace_csv(std::ostream& out, const ChainTrace& trace) {
  const std::size_t d = trace.dim;
  out << header_row("sweep,rho_star", "theta_", d);
  for (std::size_t j = 1; j <= d; ++j) out << ",ell_" << j;
  out << ",loglik";
  for (std::size_t j = 1; j <= d; ++j) out << ",theta_acc_" << j;
  for (std::size_t j = 1; j <= d; ++j) out << ",ell_acc_" << j;
  out << ",pcn_acc,zeta\n";
  for (const auto& r : trace.sweeps) {
    out << r.sweep << ',' << format_double(r.rho_star);
    for (double t : r.theta) out << ',' << format_double(t);
    for (double l : r.ell) out << ',' << format_double(l);
    out << ',' << format_double(r.loglik);
    for (auto a : r.theta_accepted) out << ',' << static_cast<int>(a);
    for (auto a : r.ell_accepted) out << ',' << static_cast<int>(a);
    out << ',' << r.pcn_accepted << ',' << format_double(r.zeta) << '\n';
  }
}

std::vector<SweepRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("trace csv: missing header");
  const auto head = split_csv_line(line);
  // sweep, rho_star, 2d + 2d columns, loglik, pcn_acc, zeta
  if (head.size() < 9 || (head.size() - 5) % 4 != 0) throw Error("trace csv: unexpected header");
  const std::size_t d = (head.size() - 5) / 4;
  std::vector<SweepRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (blank(line)) continue;
    const auto c = split_csv_line(line);
    if (c.size() != head.size()) throw Error("trace csv: row " + std::to_string(row) + " has the wrong column count");
    SweepRecord r;
    std::size_t k = 0;
    r.sweep = parse_index(c[k++]);
    r.rho_star = parse_double(c[k++]);
    for (std::size_t j = 0; j < d; ++j) r.theta.push_back(parse_double(c[k++]));
    for (std::size_t j = 0; j < d; ++j) r.ell.push_back(parse_double(c[k++]));
    r.loglik = parse_double(c[k++]);
    for (std::size_t j = 0; j < d; ++j) r.theta_accepted.push_back(static_cast<std::uint8_t>(parse_index(c[k++])));
    for (std::size_t j = 0; j < d; ++j) r.ell_accepted.push_back(static_cast<std::uint8_t>(parse_index(c[k++])));
    r.pcn_accepted = static_cast<std::uint32_t>(parse_index(c[k++]));
    r.zeta = parse_double(c[k++]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_w_csv(std::ostream& out, const ChainTrace& trace) {
  out << "sweep,node,value\n";
  for (const auto& s : trace.states) {
    for (std::size_t v = 0; v < s.w.size(); ++v) out << s.sweep << ',' << v << ',' << format_double(s.w[v]) << '\n';
  }
}

namespace {

StateSnapshot state_from_record(std::size_t sweep, std::vector<double> w, std::span<const SweepRecord> sweeps) {
  for (const auto& r : sweeps) {
    if (r.sweep == sweep) return StateSnapshot{sweep, r.rho_star, r.theta, r.ell, std::move(w)};
  }
  throw Error("w table: sweep " + std::to_string(sweep) + " missing from the trace");
}

}  // namespace

std::vector<StateSnapshot> read_w_csv(std::istream& in, std::span<const SweepRecord> sweeps) {
  std::string line;
  if (!std::getline(in, line)) throw Error("w csv: missing header");
  expect_header(line, "sweep,node,value", "w csv");
  std::vector<StateSnapshot> out;
  std::size_t current = 0;
  std::vector<double> w;
  bool open = false;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (blank(line)) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 3) throw Error("w csv: row " + std::to_string(row) + " has the wrong column count");
    const std::size_t sweep = parse_index(c[0]);
    const std::size_t node = parse_index(c[1]);
    if (!open || sweep != current) {
      if (open) out.push_back(state_from_record(current, std::move(w), sweeps));
      w.clear();
      current = sweep;
      open = true;
    }
    if (node != w.size()) throw Error("w csv: row " + std::to_string(row) + " breaks the node order");
    w.push_back(parse_double(c[2]));
  }
  if (open) out.push_back(state_from_record(current, std::move(w), sweeps));
  return out;
}

namespace {
constexpr char kWMagic[8] = {'C', 'O', 'X', 'G', 'P', 'W', '1', '\0'};
}

void write_w_binary(std::ostream& out, const ChainTrace& trace) {
  const std::uint64_t rows = trace.states.size();
  const std::uint64_t cols = trace.basis_size;
  out.write(kWMagic, sizeof kWMagic);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  for (const auto& s : trace.states) {
    require(s.w.size() == cols, "w binary: state size does not match the basis");
    const std::uint64_t sweep = s.sweep;
    out.write(reinterpret_cast<const char*>(&sweep), sizeof sweep);
    out.write(reinterpret_cast<const char*>(s.w.data()), static_cast<std::streamsize>(cols * sizeof(double)));
  }
}

std::vector<StateSnapshot> read_w_binary(std::istream& in, std::span<const SweepRecord> sweeps) {
  char magic[8];
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || std::memcmp(magic, kWMagic, sizeof magic) != 0) throw Error("w binary: bad header");
  std::vector<StateSnapshot> out;
  for (std::uint64_t r = 0; r < rows; ++r) {
    std::uint64_t sweep = 0;
    std::vector<double> w(cols);
    in.read(reinterpret_cast<char*>(&sweep), sizeof sweep);
    in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(cols * sizeof(double)));
    if (!in) throw Error("w binary: truncated file");
    out.push_back(state_from_record(sweep, std::move(w), sweeps));
  }
  return out;
}

void write_estimate_csv(std::ostream& out, const IntensityEstimate& e) {
  const std::size_t d = e.grid.dim();
  out << "# level=" << format_double(e.level) << " quantile=" << kQuantileMethod << " samples=" << e.samples << '\n';
  out << header_row("", "z_", d).substr(1) << ",mean,lower,upper\n";
  std::vector<double> z(d);
  for (std::size_t p = 0; p < e.grid.size(); ++p) {
    e.grid.point(p, z);
    for (double v : z) out << format_double(v) << ',';
    out << format_double(e.mean[p]) << ',' << format_double(e.lower[p]) << ',' << format_double(e.upper[p]) << '\n';
  }
}

void write_kernel_csv(std::ostream& out, const KernelEstimate& e) {
  out << header_row("", "z_", e.dim).substr(1) << ",value,supported\n";
  for (std::size_t p = 0; p < e.size(); ++p) {
    for (std::size_t j = 0; j < e.dim; ++j) out << format_double(e.points[p * e.dim + j]) << ',';
    out << format_double(e.values[p]) << ',' << static_cast<int>(e.supported[p]) << '\n';
  }
}

void write_spatial_csv(std::ostream& out, std::span<const double> xs, std::size_t spatial_dim,
                       std::span<const double> values) {
  require(xs.size() == values.size() * spatial_dim, "spatial csv: size mismatch");
  out << header_row("", "x_", spatial_dim).substr(1) << ",value\n";
  for (std::size_t p = 0; p < values.size(); ++p) {
    for (std::size_t k = 0; k < spatial_dim; ++k) out << format_double(xs[p * spatial_dim + k]) << ',';
    out << format_double(values[p]) << '\n';
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace coxgp
