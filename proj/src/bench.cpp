#include "natr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "natr/errors.hpp"

namespace natr {

std::vector<ProblemSpec> default_suite() {
  std::vector<ProblemSpec> suite;
  for (const ProblemInfo& info : problem_registry())
    suite.push_back(ProblemSpec{info.name, info.smallest_listed()});
  return suite;
}

std::vector<ProblemSpec> parse_suite(std::istream& in, const std::string& source) {
  std::vector<ProblemSpec> suite;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    long long dim = 0;
    std::string extra;
    if (!(ls >> dim) || dim <= 0 || (ls >> extra))
      throw IoError(source + ":" + std::to_string(lineno) + ": expected 'NAME DIM'");
    suite.push_back(ProblemSpec{name, std::size_t(dim)});
  }
  return suite;
}

std::vector<ProblemSpec> read_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open suite file");
  return parse_suite(in, path.string());
}

std::vector<SolverSpec> comparison_solvers(const TrustRegionConfig& base) {
  std::vector<SolverSpec> out;
  for (Policy p : {Policy::natr, Policy::iatr_monotone, Policy::max_window, Policy::relaxed_max}) {
    TrustRegionConfig cfg = base;
    cfg.policy = p;
    out.push_back(SolverSpec{std::string(policy_name(p)), cfg});
  }
  return out;
}

std::vector<RunRecord> run_suite(std::span<const ProblemSpec> problems,
                                 std::span<const SolverSpec> solvers,
                                 const BenchOptions& options) {
  if (problems.empty() || solvers.empty())
    throw PreconditionError("run_suite: problem and solver lists must be nonempty");
  for (const SolverSpec& s : solvers) s.config.validate();
  // Resolve every problem up front so a typo fails fast instead of per run.
  std::vector<Problem> built;
  built.reserve(problems.size());
  for (const ProblemSpec& ps : problems) built.push_back(make_problem(ps.name, ps.dim));

  const std::size_t S = solvers.size();
  const std::size_t total = problems.size() * S;
  std::vector<RunRecord> records(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < total; t = next.fetch_add(1)) {
      const std::size_t ip = t / S;
      const std::size_t is = t % S;
      TrustRegionConfig cfg = solvers[is].config;
      cfg.record_trace = false;
      if (options.max_iters) cfg.max_iters = *options.max_iters;
      if (options.max_fevals) cfg.max_fevals = *options.max_fevals;

      RunRecord& rec = records[t];
      rec.problem = problems[ip].name;
      rec.dim = problems[ip].dim;
      rec.solver = solvers[is].name;
      try {
        if (options.warmup) (void)solve(built[ip], cfg);
        const RunResult r = solve(built[ip], cfg);
        rec.status = r.status;
        rec.iters = r.iters;
        rec.fevals = r.fevals;
        rec.wall_time = r.wall_time;
      } catch (const std::exception&) {
        rec.status = RunStatus::numerical_failure;
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.parallelism, 1, total);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  return records;
}

// ---------------------------------------------------------------------------
// Profiles

std::string_view to_string(CostIndex c) noexcept {
  switch (c) {
    case CostIndex::fevals:
      return "fevals";
    case CostIndex::iters:
      return "iters";
    case CostIndex::time:
      return "time";
  }
  return "unknown";
}

std::optional<CostIndex> parse_cost_index(std::string_view s) noexcept {
  for (CostIndex c : {CostIndex::fevals, CostIndex::iters, CostIndex::time})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

namespace {

double cost_of(const RunRecord& r, CostIndex index) {
  switch (index) {
    case CostIndex::fevals:
      return std::max(1.0, double(r.fevals));
    case CostIndex::iters:
      return std::max(1.0, double(r.iters));
    case CostIndex::time:
      return std::max(1e-9, r.wall_time);
  }
  return 1.0;
}

}  // namespace

std::vector<ProfileCurve> performance_profile(std::span<const RunRecord> records, CostIndex index) {
  std::vector<std::string> solvers;
  std::vector<std::pair<std::string, std::size_t>> problems;
  for (const RunRecord& r : records) {
    if (std::find(solvers.begin(), solvers.end(), r.solver) == solvers.end())
      solvers.push_back(r.solver);
    const auto key = std::make_pair(r.problem, r.dim);
    if (std::find(problems.begin(), problems.end(), key) == problems.end())
      problems.push_back(key);
  }
  const std::size_t S = solvers.size();
  const std::size_t P = problems.size();

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // cost[p][s]; NaN marks a missing pair.
  std::vector<std::vector<double>> cost(P, std::vector<double>(S, std::nan("")));
  for (const RunRecord& r : records) {
    const auto ip = std::size_t(
        std::find(problems.begin(), problems.end(), std::make_pair(r.problem, r.dim)) -
        problems.begin());
    const auto is =
        std::size_t(std::find(solvers.begin(), solvers.end(), r.solver) - solvers.begin());
    if (!std::isnan(cost[ip][is]))
      throw PreconditionError("performance_profile: duplicate record for " + r.problem + "/" +
                              r.solver);
    cost[ip][is] = (r.status == RunStatus::converged) ? cost_of(r, index) : kInf;
  }
  for (std::size_t ip = 0; ip < P; ++ip)
    for (std::size_t is = 0; is < S; ++is)
      if (std::isnan(cost[ip][is]))
        throw PreconditionError("performance_profile: missing record for " +
                                problems[ip].first + "/" + solvers[is]);

  // ratio[p][s] over retained problems only.
  std::vector<std::vector<double>> ratio;
  for (const auto& row : cost) {
    const double best = *std::min_element(row.begin(), row.end());
    if (!std::isfinite(best)) continue;
    std::vector<double> rr(S);
    for (std::size_t is = 0; is < S; ++is) rr[is] = std::isfinite(row[is]) ? row[is] / best : kInf;
    ratio.push_back(std::move(rr));
  }
  const std::size_t kept = ratio.size();

  std::vector<double> taus;
  for (const auto& rr : ratio)
    for (double v : rr)
      if (std::isfinite(v)) taus.push_back(v);
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  std::vector<ProfileCurve> curves(S);
  for (std::size_t is = 0; is < S; ++is) {
    ProfileCurve& c = curves[is];
    c.solver = solvers[is];
    c.problems = kept;
    std::vector<double> mine;
    for (const auto& rr : ratio)
      if (std::isfinite(rr[is])) mine.push_back(rr[is]);
    std::sort(mine.begin(), mine.end());
    c.solved_fraction = kept ? double(mine.size()) / double(kept) : 0.0;
    for (double t : taus) {
      const auto count = std::size_t(std::upper_bound(mine.begin(), mine.end(), t) - mine.begin());
      c.points.emplace_back(t, double(count) / double(kept));
    }
  }
  return curves;
}

double profile_value(const ProfileCurve& curve, double tau) noexcept {
  double rho = 0.0;
  for (const auto& [t, r] : curve.points) {
    if (t > tau) break;
    rho = r;
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Files

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(path.string() + ": write failed");
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

constexpr const char* kRecordsHeader = "problem,dim,solver,status,iters,fevals,time_s";

}  // namespace

void write_records_csv(std::ostream& os, std::span<const RunRecord> records) {
  os << kRecordsHeader << '\n';
  for (const RunRecord& r : records) {
    os << r.problem << ',' << r.dim << ',' << r.solver << ',' << to_string(r.status) << ','
       << r.iters << ',' << r.fevals << ',' << fmt("%.9g", r.wall_time) << '\n';
  }
}

void export_records_csv(std::span<const RunRecord> records, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_records_csv(out, records);
  check_written(out, path);
}

std::vector<RunRecord> parse_records_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(source + ": empty records file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) throw IoError(source + ":1: unexpected header '" + line + "'");
  std::vector<RunRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    auto bad = [&](const std::string& why) {
      return IoError(source + ":" + std::to_string(lineno) + ": " + why);
    };
    if (cells.size() != 7) throw bad("expected 7 fields");
    RunRecord r;
    r.problem = cells[0];
    r.solver = cells[2];
    const auto status = parse_status(cells[3]);
    if (!status) throw bad("unknown status '" + cells[3] + "'");
    r.status = *status;
    try {
      std::size_t pos = 0;
      r.dim = std::stoull(cells[1], &pos);
      if (pos != cells[1].size()) throw std::invalid_argument("dim");
      r.iters = std::stoull(cells[4], &pos);
      if (pos != cells[4].size()) throw std::invalid_argument("iters");
      r.fevals = std::stoull(cells[5], &pos);
      if (pos != cells[5].size()) throw std::invalid_argument("fevals");
      r.wall_time = std::stod(cells[6], &pos);
      if (pos != cells[6].size()) throw std::invalid_argument("time_s");
    } catch (const std::logic_error&) {
      throw bad("malformed numeric field");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open records file");
  return parse_records_csv(in, path.string());
}

void write_curves_csv(std::ostream& os, std::span<const ProfileCurve> curves) {
  os << "solver,tau,rho\n";
  for (const ProfileCurve& c : curves)
    for (const auto& [tau, rho] : c.points)
      os << c.solver << ',' << fmt("%.17g", tau) << ',' << fmt("%.17g", rho) << '\n';
}

void export_curves_csv(std::span<const ProfileCurve> curves, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_curves_csv(out, curves);
  check_written(out, path);
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_svg(std::ostream& os, std::span<const ProfileCurve> curves, bool log2_axis,
               const std::string& title) {
  constexpr double W = 640, H = 420, left = 60, right = 150, top = 40, bottom = 50;
  const double pw = W - left - right;
  const double ph = H - top - bottom;

  double tau_max = 1.0;
  for (const ProfileCurve& c : curves)
    for (const auto& pt : c.points) tau_max = std::max(tau_max, pt.first);
  tau_max = std::max(tau_max * (log2_axis ? 2.0 : 1.1), 2.0);

  auto axis = [&](double tau) { return log2_axis ? std::log2(tau) : tau; };
  const double a0 = axis(1.0);
  const double a1 = axis(tau_max);
  auto px = [&](double tau) { return left + (axis(tau) - a0) / (a1 - a0) * pw; };
  auto py = [&](double rho) { return top + (1.0 - rho) * ph; };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
     << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"14\">" << xml_escape(title) << "</text>\n"
     << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  // y ticks
  for (int i = 0; i <= 5; ++i) {
    const double rho = i / 5.0;
    os << "<line x1=\"" << left - 4 << "\" y1=\"" << py(rho) << "\" x2=\"" << left << "\" y2=\""
       << py(rho) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << left - 8 << "\" y=\"" << py(rho) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << fmt("%.1f", rho) << "</text>\n";
  }
  // x ticks
  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double a = a0 + (a1 - a0) * i / nticks;
    const double tau = log2_axis ? std::exp2(a) : a;
    const double x = px(tau);
    os << "<line x1=\"" << x << "\" y1=\"" << top + ph << "\" x2=\"" << x << "\" y2=\""
       << top + ph + 4 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << x << "\" y=\"" << top + ph + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << fmt("%.3g", tau) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
     << (log2_axis ? "tau (log2 scale)" : "tau") << "</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const ProfileCurve& c = curves[i];
    const char* color = kPalette[i % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    double rho = 0.0;
    os << px(1.0) << ',' << py(rho);
    for (const auto& [tau, r] : c.points) {
      os << ' ' << px(tau) << ',' << py(rho) << ' ' << px(tau) << ',' << py(r);
      rho = r;
    }
    os << ' ' << px(tau_max) << ',' << py(rho) << "\"/>\n";

    const double ly = top + 10 + 20.0 * double(i);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(c.solver)
       << "</text>\n";
  }
  os << "</svg>\n";
}

void export_svg(std::span<const ProfileCurve> curves, const std::filesystem::path& path,
                bool log2_axis, const std::string& title) {
  auto out = open_out(path);
  write_svg(out, curves, log2_axis, title);
  check_written(out, path);
}

}  // namespace natr
