#include "cutquad/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "cutquad/baseline.hpp"
#include "cutquad/ci_config.hpp"
#include "cutquad/harness.hpp"
#include "cutquad/reporting.hpp"
#include "cutquad/version.hpp"

namespace cutquad {

namespace fs = std::filesystem;

namespace {

// Quadrature-point plots are skipped above this many points.
constexpr std::size_t kMaxPlottedPoints = 20000;

struct Options {
  std::vector<std::string> integrators;
  std::vector<std::string> testcases;
  std::vector<std::string> operations;
  std::vector<int> mesh;
  std::string tier = "all";
  int order = 5;
  std::optional<int> depth;
  std::vector<std::string> params;
  std::string output;
  std::string baseline;
  std::optional<std::uint64_t> seed;
  bool timing = false;
  int threads = std::max(1u, std::thread::hardware_concurrency());
  std::string testcase_dir;
  std::string input;
  int steps = 0;
  int shift_mesh = 8;
  std::vector<double> from, to;
  bool json = false;
  std::vector<std::string> tags;
  std::string default_tag;
};

/// Everything a subcommand needs after validation.
struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string command;
  fs::path output;
};

std::vector<TestCase> load_cases(const Options& o) {
  if (o.testcase_dir.empty()) return builtin_catalog();
  if (!fs::is_directory(o.testcase_dir)) {
    throw std::invalid_argument("--testcase-dir " + o.testcase_dir + " is not a directory");
  }
  auto cases = load_catalog(o.testcase_dir);
  if (cases.empty()) throw std::invalid_argument("no test cases in " + o.testcase_dir);
  return cases;
}

std::vector<TestCase> select_cases(const Options& o, const std::vector<std::string>& fallback = {}) {
  const auto catalog = load_cases(o);
  const auto& ids = o.testcases.empty() ? fallback : o.testcases;
  if (ids.empty()) return catalog;
  std::vector<TestCase> out;
  for (const auto& id : ids) {
    auto it = std::find_if(catalog.begin(), catalog.end(), [&](const TestCase& t) { return t.id == id; });
    if (it == catalog.end()) throw std::invalid_argument("unknown test case '" + id + "'");
    out.push_back(*it);
  }
  return out;
}

std::vector<IntegratorPtr> select_integrators(const Options& o) {
  const auto& registry = builtin_registry();
  auto params = parse_parameter_assignments(o.params);
  for (const auto& [name, _] : params) {
    if (!registry.contains(name)) throw std::invalid_argument("--param names unknown integrator '" + name + "'");
  }
  if (o.depth) {
    params["quadtree"]["depth"] = std::to_string(*o.depth);
    params["quadtree"]["depth3d"] = std::to_string(*o.depth);
  }
  if (o.seed) params["montecarlo"]["seed"] = std::to_string(*o.seed);
  const auto names = o.integrators.empty() ? registry.names() : o.integrators;
  std::vector<IntegratorPtr> out;
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) throw std::invalid_argument("integrator '" + name + "' given twice");
    auto it = params.find(name);
    out.push_back(registry.create(name, it == params.end() ? ParameterMap{} : it->second));
  }
  return out;
}

std::vector<Operation> select_operations(const Options& o) {
  std::vector<Operation> ops;
  if (o.operations.empty()) return {std::begin(kAllOperations), std::end(kAllOperations)};
  for (const auto& name : o.operations) ops.push_back(operation_from_string(name));
  return ops;
}

// Operations for one case: explicit ones, else its own area or volume.
std::vector<Operation> study_operations(const Options& o, const TestCase& tc) {
  if (!o.operations.empty()) return select_operations(o);
  return {tc.dim == 3 ? Operation::Volume3D : Operation::Area2D};
}

fs::path resolve_output(const Options& o) {
  fs::path p = o.output;
  if (p.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    p = (env && *env) ? env : "artifacts";
  }
  if (fs::exists(p) && !fs::is_directory(p)) {
    throw std::invalid_argument("output path " + p.string() + " exists and is not a directory");
  }
  return p;
}

BenchmarkSuite build_suite(const Options& o) {
  BenchmarkSuite s;
  s.testcases = select_cases(o);
  s.integrators = select_integrators(o);
  s.operations = select_operations(o);
  s.mesh_plan = o.mesh.empty() ? std::vector<int>{2, 4, 8, 16, 32} : o.mesh;
  s.order = o.order;
  s.timing = o.timing;
  s.threads = o.threads;
  return s;
}

std::optional<BaselineFile> load_optional_baseline(const Options& o) {
  if (o.baseline.empty()) return std::nullopt;
  if (!fs::is_regular_file(o.baseline)) throw std::invalid_argument("baseline " + o.baseline + " not found");
  return load_baseline(o.baseline);
}

std::vector<fs::path> find_files(const fs::path& root, const std::string& extension,
                                 const std::string& filename, const fs::path& exclude) {
  std::vector<fs::path> out;
  if (fs::is_regular_file(root)) return {root};
  if (!fs::is_directory(root)) throw std::invalid_argument("input " + root.string() + " does not exist");
  const fs::path excluded = exclude.empty() ? fs::path() : fs::weakly_canonical(exclude);
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const fs::path p = e.path();
    if (!filename.empty() && p.filename() != filename) continue;
    if (!extension.empty() && p.extension() != extension) continue;
    if (!excluded.empty()) {
      const auto rel = fs::weakly_canonical(p).lexically_relative(excluded);
      if (!rel.empty() && *rel.begin() != "..") continue;
    }
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Measurement> read_inputs(const std::vector<fs::path>& files) {
  std::vector<Measurement> all;
  for (const auto& f : files) {
    try {
      auto ms = read_measurements_csv(f);
      all.insert(all.end(), ms.begin(), ms.end());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(f.string() + ": " + e.what());
    }
  }
  return all;
}

std::string file_stem_for(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return out;
}

SummaryMetadata metadata(const Context& ctx, const std::string& title) {
  SummaryMetadata m;
  m.title = title;
  m.timestamp = utc_timestamp();
  m.revision = code_revision();
  m.command = ctx.command;
  return m;
}

std::vector<fs::path> relative_to(const std::vector<fs::path>& paths, const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& p : paths) out.push_back(fs::proximate(p, dir));
  return out;
}

void print_measurements(std::ostream& out, const std::vector<Measurement>& ms) {
  std::size_t ok = 0, unsupported = 0, failed = 0;
  for (const auto& m : ms) {
    switch (m.status) {
      case Status::Ok: ++ok; break;
      case Status::Unsupported: ++unsupported; break;
      case Status::Failed:
        ++failed;
        out << fmt::format("FAILED {} {} {} {}: {}\n", m.testcase_id, m.integrator_name, to_string(m.operation),
                           m.mesh_divisions, m.message);
        break;
    }
  }
  out << fmt::format("{} measurements: {} ok, {} unsupported, {} failed\n", ms.size(), ok, unsupported, failed);
}

void print_report(std::ostream& out, const ComparisonReport& r) {
  for (const auto& v : r.verdicts) {
    if (v.pass) continue;
    const auto& e = v.expected;
    out << fmt::format("FAIL {} {} {} {}: {}\n", e.testcase_id, e.integrator_name, to_string(e.operation),
                       e.mesh_divisions, v.reason);
  }
  out << fmt::format("baseline: {} entries, {} failures, {} execution errors, {} unmatched measurements\n",
                     r.verdicts.size(), r.failures(), r.execution_errors.size(), r.extras.size());
}

void write_comparison_csv(const ComparisonReport& r, const fs::path& path) {
  std::string text =
      "testcase,integrator,operation,divisions,expected_status,expected_rel_error,measured_status,"
      "measured_rel_error,pass,reason\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : std::string(); };
  auto q = [](std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
    return o + "\"";
  };
  for (const auto& v : r.verdicts) {
    const auto& e = v.expected;
    text += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", q(e.testcase_id), q(e.integrator_name),
                        to_string(e.operation), e.mesh_divisions, to_string(e.status), opt(e.rel_error),
                        v.measured ? to_string(v.measured->status) : "missing",
                        v.measured ? opt(v.measured->rel_error) : "", v.pass ? "pass" : "fail", q(v.reason));
  }
  write_text_file(path, text);
}

// Point plots on the coarsest mesh for every 2D case and integrator.
std::vector<fs::path> write_point_plots(const BenchmarkSuite& suite, const ArtifactLayout& layout,
                                        ArtifactManifest& manifest, const std::string& command) {
  std::vector<fs::path> plots;
  const int divisions = suite.mesh_plan.front();
  for (const auto& tc : suite.testcases) {
    if (tc.dim != 2) continue;
    const CartesianMesh mesh(tc.domain, divisions);
    for (const auto& integrator : suite.integrators) {
      const auto r = integrator->compute(Operation::Area2D, tc, mesh, suite.order);
      if (!r.ok() || r.quadrature.points.size() > kMaxPlottedPoints) continue;
      const fs::path p = layout.plots() / fmt::format("points_{}_{}_{}.svg", file_stem_for(tc.id),
                                                      file_stem_for(integrator->name()), divisions);
      plot_points_svg(tc, mesh, r.quadrature, p);
      manifest.add(p, ArtifactKind::Svg, command);
      plots.push_back(p);
    }
  }
  return plots;
}

std::vector<fs::path> write_convergence(const std::vector<ConvergenceTable>& tables, const ArtifactLayout& layout,
                                        ArtifactManifest& manifest, const std::string& command) {
  std::vector<fs::path> plots;
  if (tables.empty()) return plots;
  const fs::path csv = layout.csv() / "convergence.csv";
  write_convergence_csv(tables, csv);
  manifest.add(csv, ArtifactKind::Csv, command);
  std::vector<std::pair<std::string, Operation>> groups;
  for (const auto& t : tables) {
    if (std::find(groups.begin(), groups.end(), std::pair{t.testcase_id, t.operation}) == groups.end()) {
      groups.emplace_back(t.testcase_id, t.operation);
    }
  }
  for (const auto& [id, op] : groups) {
    std::vector<ConvergenceTable> group;
    for (const auto& t : tables) {
      const bool any_ok = std::any_of(t.rows.begin(), t.rows.end(),
                                      [](const ConvergenceRow& r) { return r.measurement.rel_error.has_value(); });
      if (t.testcase_id == id && t.operation == op && any_ok) group.push_back(t);
    }
    if (group.empty()) continue;
    const fs::path p = layout.plots() / fmt::format("convergence_{}_{}.svg", file_stem_for(id), to_string(op));
    plot_convergence_svg(group, p);
    manifest.add(p, ArtifactKind::Svg, command);
    plots.push_back(p);
  }
  return plots;
}

struct ShiftOutput {
  std::vector<ShiftSeries> series;
  std::vector<fs::path> plots;
};

// Shift studies for every case and operation; validated before running.
std::vector<std::vector<ShiftSeries>> run_shift_studies(const std::vector<TestCase>& cases,
                                                        const std::vector<IntegratorPtr>& integrators,
                                                        const std::vector<Operation>& ops_filter,
                                                        const Options& o, int steps) {
  std::vector<std::vector<ShiftSeries>> groups;
  for (const auto& tc : cases) {
    std::vector<Operation> ops;
    if (ops_filter.empty()) {
      ops = {tc.dim == 3 ? Operation::Volume3D : Operation::Area2D};
    } else {
      for (Operation op : ops_filter) {
        if (operation_dim(op) == tc.dim) ops.push_back(op);
      }
    }
    auto [start, end] = default_shift_sweep(tc);
    if (!o.from.empty()) std::copy(o.from.begin(), o.from.end(), start.begin());
    if (!o.to.empty()) std::copy(o.to.begin(), o.to.end(), end.begin());
    for (Operation op : ops) {
      std::vector<ShiftSeries> group;
      for (const auto& integrator : integrators) {
        group.push_back(shift_study(tc, integrator, op, o.shift_mesh, steps, start, end, o.order, o.threads));
      }
      groups.push_back(std::move(group));
    }
  }
  return groups;
}

ShiftOutput write_shift(const std::vector<std::vector<ShiftSeries>>& groups, const ArtifactLayout& layout,
                        ArtifactManifest& manifest, const std::string& command) {
  ShiftOutput out;
  for (const auto& g : groups) out.series.insert(out.series.end(), g.begin(), g.end());
  if (out.series.empty()) return out;
  const fs::path csv = layout.csv() / "shift.csv";
  write_shift_csv(out.series, csv);
  manifest.add(csv, ArtifactKind::Csv, command);
  for (const auto& g : groups) {
    if (g.empty()) continue;
    const fs::path p = layout.plots() / fmt::format("shift_{}_{}.svg", file_stem_for(g.front().testcase_id),
                                                    to_string(g.front().operation));
    plot_shift_svg(g, p);
    manifest.add(p, ArtifactKind::Svg, command);
    out.plots.push_back(p);
  }
  return out;
}

void print_shift(std::ostream& out, const std::vector<ShiftSeries>& series) {
  for (const auto& s : series) {
    out << fmt::format("{} {} {} mesh {}: {} steps, max {:.3e}, min {:.3e}, median {:.3e}, spread {:.3e}, "
                       "{} failed, {} unsupported\n",
                       s.testcase_id, s.integrator_name, to_string(s.operation), s.mesh_divisions,
                       s.measurements.size(), s.max_error, s.min_error, s.median_error, s.max_error - s.min_error,
                       s.failed, s.unsupported);
  }
}

std::size_t shift_failures(const std::vector<ShiftSeries>& series) {
  std::size_t n = 0;
  for (const auto& s : series) n += s.failed;
  return n;
}

std::vector<Measurement> flatten(const std::vector<ShiftSeries>& series) {
  std::vector<Measurement> out;
  for (const auto& s : series) out.insert(out.end(), s.measurements.begin(), s.measurements.end());
  return out;
}

void finish(const Context& ctx, ArtifactManifest& manifest) {
  const fs::path p = manifest.write();
  ctx.out << "artifacts: " << ctx.output.string() << " (manifest " << p.string() << ")\n";
}

// Subcommands -------------------------------------------------------------------------

int cmd_list(const Options& o, std::ostream& out) {
  const auto cases = load_cases(o);
  const auto& registry = builtin_registry();
  if (o.json) {
    auto j = nlohmann::ordered_json::object();
    j["integrators"] = nlohmann::ordered_json::array();
    for (const auto& name : registry.names()) {
      j["integrators"].push_back(nlohmann::ordered_json::parse(registry.create(name)->descriptor().to_json_text()));
    }
    j["testcases"] = nlohmann::ordered_json::array();
    for (const auto& tc : cases) j["testcases"].push_back(nlohmann::ordered_json::parse(testcase_to_json_text(tc)));
    out << j.dump(2) << "\n";
    return kExitPass;
  }
  out << "integrators:\n";
  for (const auto& name : registry.names()) {
    const auto integrator = registry.create(name);
    const auto& d = integrator->descriptor();
    std::vector<std::string> caps;
    for (Operation op : d.capabilities) caps.push_back(to_string(op));
    out << fmt::format("  {:<11} interface={:<10} dims={} capabilities={} parameters={}\n", d.name,
                       to_string(d.interface_type), fmt::join(d.supported_dims, ","), fmt::join(caps, ","),
                       property_string(d.parameters));
  }
  out << "testcases:\n";
  for (const auto& tc : cases) {
    std::vector<std::string> refs;
    for (const auto& [kind, value] : tc.references) refs.push_back(fmt::format("{}={:.17g}", to_string(kind), value));
    out << fmt::format("  {:<11} dim={} tier={:<9} divisions={} loop={} {}\n", tc.id, tc.dim, to_string(tc.tier),
                       tc.divisions_hint, tc.loop ? "yes" : "no", fmt::join(refs, " "));
  }
  return kExitPass;
}

int cmd_run(const Options& o, const Context& ctx) {
  const auto filtered = tier_filter(build_suite(o), tier_selection_from_string(o.tier));
  const BenchmarkSuite& suite = filtered.suite;
  if (filtered.warning) ctx.err << "warning: " << *filtered.warning << "\n";
  if (!suite.testcases.empty()) suite.validate();
  const auto baseline = load_optional_baseline(o);
  if (o.steps < 0) throw std::invalid_argument("--steps must be positive");
  const int steps = o.steps > 0 ? o.steps : 100;
  if (suite.shift_studies) {
    for (const auto& tc : suite.testcases) {
      auto [start, end] = default_shift_sweep(tc);
      if (!o.from.empty()) std::copy(o.from.begin(), o.from.end(), start.begin());
      if (!o.to.empty()) std::copy(o.to.begin(), o.to.end(), end.begin());
      translate_testcase(tc, start);
      translate_testcase(tc, end);
    }
  }

  const std::vector<Measurement> measurements =
      suite.testcases.empty() ? std::vector<Measurement>{} : run_suite(suite);
  std::vector<std::vector<ShiftSeries>> shift_groups;
  if (suite.shift_studies && !suite.testcases.empty()) {
    shift_groups = run_shift_studies(suite.testcases, suite.integrators, o.operations.empty()
                                                                              ? std::vector<Operation>{}
                                                                              : suite.operations,
                                     o, steps);
  }

  const ArtifactLayout layout{ctx.output};
  layout.create();
  ArtifactManifest manifest{ctx.output, {}};
  const fs::path csv = layout.csv() / "measurements.csv";
  write_measurements_csv(measurements, csv);
  manifest.add(csv, ArtifactKind::Csv, ctx.command);

  std::vector<fs::path> plots;
  if (!suite.testcases.empty()) {
    plots = write_point_plots(suite, layout, manifest, ctx.command);
    const auto conv = write_convergence(convergence_tables(measurements, suite.testcases), layout, manifest,
                                        ctx.command);
    plots.insert(plots.end(), conv.begin(), conv.end());
  }
  const auto shift = write_shift(shift_groups, layout, manifest, ctx.command);
  plots.insert(plots.end(), shift.plots.begin(), shift.plots.end());

  std::optional<ComparisonReport> report;
  if (baseline) {
    report = compare_to_baseline(measurements, *baseline);
    const fs::path cmp = layout.csv() / "comparison.csv";
    write_comparison_csv(*report, cmp);
    manifest.add(cmp, ArtifactKind::Csv, ctx.command);
  }
  const fs::path html = layout.summary() / "index.html";
  html_summary(measurements, report ? &*report : nullptr, relative_to(plots, layout.summary()), html,
               metadata(ctx, fmt::format("cutquad run ({} tier)", to_string(suite.tier))));
  manifest.add(html, ArtifactKind::Html, ctx.command);
  finish(ctx, manifest);

  print_measurements(ctx.out, measurements);
  print_shift(ctx.out, shift.series);
  int code = report ? gate_exit_code(*report) : gate_exit_code(measurements);
  if (report) print_report(ctx.out, *report);
  if (shift_failures(shift.series) > 0) code = kExitError;
  return code;
}

int cmd_convergence(const Options& o, const Context& ctx) {
  const auto cases = select_cases(o, {"circle"});
  const auto integrators = select_integrators(o);
  const std::vector<int> plan = o.mesh.empty() ? std::vector<int>{2, 4, 8, 16, 32} : o.mesh;
  if (plan.size() < 2) throw std::invalid_argument("convergence needs at least two meshes");
  std::vector<BenchmarkSuite> suites;
  for (const auto& tc : cases) {
    BenchmarkSuite s;
    s.testcases = {tc};
    s.integrators = integrators;
    s.operations = study_operations(o, tc);
    s.mesh_plan = plan;
    s.order = o.order;
    s.threads = o.threads;
    s.validate();
    suites.push_back(std::move(s));
  }

  std::vector<Measurement> measurements;
  for (const auto& s : suites) {
    const auto ms = run_suite(s);
    measurements.insert(measurements.end(), ms.begin(), ms.end());
  }
  const auto tables = convergence_tables(measurements, cases);

  const ArtifactLayout layout{ctx.output};
  layout.create();
  ArtifactManifest manifest{ctx.output, {}};
  const fs::path csv = layout.csv() / "measurements.csv";
  write_measurements_csv(measurements, csv);
  manifest.add(csv, ArtifactKind::Csv, ctx.command);
  const auto plots = write_convergence(tables, layout, manifest, ctx.command);
  const fs::path html = layout.summary() / "index.html";
  html_summary(measurements, nullptr, relative_to(plots, layout.summary()), html,
               metadata(ctx, "cutquad convergence study"));
  manifest.add(html, ArtifactKind::Html, ctx.command);
  finish(ctx, manifest);

  for (const auto& t : tables) {
    ctx.out << fmt::format("{} {} {}: order {}\n", t.testcase_id, t.integrator_name, to_string(t.operation),
                           t.order_text());
    for (const auto& row : t.rows) {
      const auto& m = row.measurement;
      ctx.out << fmt::format("  {:>4} h={:<10.6g} n_points={:<8} rel_error={}\n", row.divisions, row.h, m.n_points,
                             m.rel_error ? fmt::format("{:.6e}", *m.rel_error) : to_string(m.status));
    }
  }
  return gate_exit_code(measurements);
}

int cmd_shift(const Options& o, const Context& ctx) {
  const auto cases = select_cases(o, {"circle"});
  const auto integrators = select_integrators(o);
  if (o.steps < 0) throw std::invalid_argument("--steps must be positive");
  const int steps = o.steps > 0 ? o.steps : 1000;
  if (o.shift_mesh < 1) throw std::invalid_argument("--mesh must be >= 1");
  gauss_legendre(o.order);
  const auto ops = o.operations.empty() ? std::vector<Operation>{} : select_operations(o);
  for (const auto& tc : cases) {
    auto [start, end] = default_shift_sweep(tc);
    if (!o.from.empty()) std::copy(o.from.begin(), o.from.end(), start.begin());
    if (!o.to.empty()) std::copy(o.to.begin(), o.to.end(), end.begin());
    translate_testcase(tc, start);
    translate_testcase(tc, end);
  }

  const auto groups = run_shift_studies(cases, integrators, ops, o, steps);

  const ArtifactLayout layout{ctx.output};
  layout.create();
  ArtifactManifest manifest{ctx.output, {}};
  const auto shift = write_shift(groups, layout, manifest, ctx.command);
  const auto measurements = flatten(shift.series);
  const fs::path html = layout.summary() / "index.html";
  html_summary(measurements, nullptr, relative_to(shift.plots, layout.summary()), html,
               metadata(ctx, "cutquad shift study"));
  manifest.add(html, ArtifactKind::Html, ctx.command);
  finish(ctx, manifest);

  print_shift(ctx.out, shift.series);
  return shift_failures(shift.series) > 0 ? kExitError : kExitPass;
}

// Measurements from --input CSVs, or from running the selected suite.
std::vector<Measurement> gather(const Options& o, const Context& ctx, bool& ran) {
  if (!o.input.empty()) {
    const auto files = find_files(o.input, ".csv", "measurements.csv", ctx.output);
    if (files.empty()) throw std::invalid_argument("no measurements.csv under " + o.input);
    ran = false;
    return read_inputs(files);
  }
  const auto filtered = tier_filter(build_suite(o), tier_selection_from_string(o.tier));
  if (filtered.warning) ctx.err << "warning: " << *filtered.warning << "\n";
  ran = true;
  if (filtered.suite.testcases.empty()) return {};
  filtered.suite.validate();
  return run_suite(filtered.suite);
}

int cmd_compare(const Options& o, const Context& ctx) {
  if (o.baseline.empty()) throw std::invalid_argument("compare needs --baseline");
  const auto baseline = *load_optional_baseline(o);
  bool ran = false;
  const auto measurements = gather(o, ctx, ran);
  const auto report = compare_to_baseline(measurements, baseline);

  const ArtifactLayout layout{ctx.output};
  layout.create();
  ArtifactManifest manifest{ctx.output, {}};
  const fs::path csv = layout.csv() / "measurements.csv";
  write_measurements_csv(measurements, csv);
  manifest.add(csv, ArtifactKind::Csv, ctx.command);
  const fs::path cmp = layout.csv() / "comparison.csv";
  write_comparison_csv(report, cmp);
  manifest.add(cmp, ArtifactKind::Csv, ctx.command);
  const fs::path html = layout.summary() / "index.html";
  html_summary(measurements, &report, {}, html, metadata(ctx, "cutquad baseline comparison"));
  manifest.add(html, ArtifactKind::Html, ctx.command);
  finish(ctx, manifest);

  print_report(ctx.out, report);
  const int code = gate_exit_code(report);
  ctx.out << fmt::format("gate: exit {}\n", code);
  return code;
}

int cmd_baseline(const Options& o, const Context& ctx) {
  if (o.baseline.empty()) throw std::invalid_argument("baseline needs --baseline <path to write>");
  if (fs::is_directory(o.baseline)) throw std::invalid_argument("--baseline " + o.baseline + " is a directory");
  bool ran = false;
  const auto measurements = gather(o, ctx, ran);
  const auto baseline = record_baseline(measurements);

  const ArtifactLayout layout{ctx.output};
  layout.create();
  ArtifactManifest manifest{ctx.output, {}};
  const fs::path csv = layout.csv() / "measurements.csv";
  write_measurements_csv(measurements, csv);
  manifest.add(csv, ArtifactKind::Csv, ctx.command);
  write_text_file(o.baseline, baseline_to_json_text(baseline));
  manifest.add(o.baseline, ArtifactKind::Json, ctx.command);
  finish(ctx, manifest);

  print_measurements(ctx.out, measurements);
  ctx.out << fmt::format("baseline with {} entries written to {}\n", baseline.entries.size(), o.baseline);
  return gate_exit_code(measurements);
}

int cmd_report(const Options& o, const Context& ctx) {
  if (o.input.empty()) throw std::invalid_argument("report needs --input");
  const auto files = find_files(o.input, ".csv", "measurements.csv", ctx.output);
  if (files.empty()) throw std::invalid_argument("no measurements.csv under " + o.input);
  const auto svgs = fs::is_directory(o.input) ? find_files(o.input, ".svg", "", ctx.output) : std::vector<fs::path>{};
  const auto baseline = load_optional_baseline(o);
  const auto measurements = read_inputs(files);

  const ArtifactLayout layout{ctx.output};
  layout.create();
  ArtifactManifest manifest{ctx.output, {}};
  const fs::path csv = layout.csv() / "measurements.csv";
  write_measurements_csv(measurements, csv);
  manifest.add(csv, ArtifactKind::Csv, ctx.command);
  std::optional<ComparisonReport> report;
  if (baseline) {
    report = compare_to_baseline(measurements, *baseline);
    const fs::path cmp = layout.csv() / "comparison.csv";
    write_comparison_csv(*report, cmp);
    manifest.add(cmp, ArtifactKind::Csv, ctx.command);
  }
  const fs::path html = layout.summary() / "index.html";
  html_summary(measurements, report ? &*report : nullptr, relative_to(svgs, layout.summary()), html,
               metadata(ctx, "cutquad report"));
  manifest.add(html, ArtifactKind::Html, ctx.command);
  finish(ctx, manifest);

  print_measurements(ctx.out, measurements);
  if (report) print_report(ctx.out, *report);
  return report ? gate_exit_code(*report) : gate_exit_code(measurements);
}

int cmd_ci_init(const Options& o, const Context& ctx) {
  BenchmarkSuite suite = build_suite(o);
  suite.validate();
  std::map<std::string, std::string> tags;
  for (const auto& t : o.tags) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == t.size()) {
      throw std::invalid_argument("--tag must look like integrator=tag, got '" + t + "'");
    }
    tags[t.substr(0, eq)] = t.substr(eq + 1);
  }
  PipelineOptions options;
  options.default_tag = o.default_tag;
  if (!o.baseline.empty()) options.baseline_path = o.baseline;
  if (fs::path(options.baseline_path).is_absolute()) throw std::invalid_argument("--baseline must be relative");
  const PipelineSpec spec = generate_pipeline(suite, tags, options);

  const auto quick = tier_filter(suite, TierSelection::Quick);
  if (quick.warning) ctx.err << "warning: " << *quick.warning << "\n";
  const auto measurements = quick.suite.testcases.empty() ? std::vector<Measurement>{} : run_suite(quick.suite);
  const auto baseline = record_baseline(measurements);

  fs::create_directories(ctx.output);
  ArtifactManifest manifest{ctx.output, {}};
  const fs::path yaml = ctx.output / ".gitlab-ci.yml";
  write_pipeline(spec, yaml);
  manifest.add(yaml, ArtifactKind::Yaml, ctx.command);
  const fs::path bpath = ctx.output / options.baseline_path;
  write_text_file(bpath, baseline_to_json_text(baseline));
  manifest.add(bpath, ArtifactKind::Json, ctx.command);
  finish(ctx, manifest);

  ctx.out << fmt::format("pipeline with {} jobs written to {}\n", spec.jobs.size(), yaml.string());
  ctx.out << fmt::format("starter baseline with {} entries written to {}\n", baseline.entries.size(), bpath.string());
  return gate_exit_code(measurements);
}

void add_selection(CLI::App* sub, Options& o, bool with_tier) {
  sub->add_option("--integrator", o.integrators, "Integrators, comma separated (default: all registered)")
      ->delimiter(',');
  sub->add_option("--testcase", o.testcases, "Test case ids, comma separated")->delimiter(',');
  sub->add_option("--operation", o.operations,
                  "Operations, comma separated: area2d, volume3d, curve_length, surface_area, area_flux2d, "
                  "volume_flux3d")
      ->delimiter(',');
  sub->add_option("--order", o.order, "Gauss points per direction and cell (1..64)")->capture_default_str();
  sub->add_option("--depth", o.depth, "Quadtree/octree refinement depth (sets quadtree.depth and depth3d)");
  sub->add_option("--param", o.params, "Integrator parameter as name.key=value (repeatable)");
  sub->add_option("--seed", o.seed, "Monte Carlo seed (sets montecarlo.seed)");
  sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--testcase-dir", o.testcase_dir, "Directory of test case JSON files (default: built-in catalog)");
  if (with_tier) {
    sub->add_option("--mesh", o.mesh, "Mesh plan: divisions per axis, comma separated (default 2,4,8,16,32)")
        ->delimiter(',');
    sub->add_option("--tier", o.tier, "quick, extensive or all")
        ->check(CLI::IsMember({"quick", "extensive", "all"}))
        ->capture_default_str();
    sub->add_flag("--timing", o.timing, "Median of three serialized runs per measurement");
  }
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("--output", o.output,
                  fmt::format("Output directory (default ${} or ./artifacts)", kOutputDirEnv));
}

void add_shift_range(CLI::App* sub, Options& o) {
  sub->add_option("--from", o.from, "Start offset x,y[,z] (default: symmetric x sweep)")
      ->delimiter(',')
      ->expected(2, 3);
  sub->add_option("--to", o.to, "End offset x,y[,z]")->delimiter(',')->expected(2, 3);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Benchmark harness for cut-cell quadrature methods", "cutquad"};
  app.set_version_flag("--version", version_string());
  app.set_config("--config", "", "TOML/INI file with option defaults (flags win)");
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List integrators and test cases");
  list->add_flag("--json", o.json, "JSON output");
  list->add_option("--testcase-dir", o.testcase_dir, "Directory of test case JSON files");

  auto* run = app.add_subcommand("run", "Run a benchmark suite and write CSV, plots and a summary");
  add_selection(run, o, true);
  add_output(run, o);
  run->add_option("--baseline", o.baseline, "Compare against this baseline and gate the exit status");
  run->add_option("--steps", o.steps, "Shift study steps in the extensive tier (default 100)")
      ->check(CLI::PositiveNumber);
  run->add_option("--shift-mesh", o.shift_mesh, "Shift study mesh divisions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_shift_range(run, o);

  auto* conv = app.add_subcommand("convergence", "Mesh refinement study with fitted orders");
  add_selection(conv, o, false);
  conv->add_option("--mesh", o.mesh, "Mesh plan, comma separated (default 2,4,8,16,32)")->delimiter(',');
  add_output(conv, o);

  auto* shift = app.add_subcommand("shift", "Move the interface through a fixed mesh");
  add_selection(shift, o, false);
  shift->add_option("--mesh", o.shift_mesh, "Mesh divisions per axis")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  shift->add_option("--steps", o.steps, "Number of positions (default 1000)")->check(CLI::PositiveNumber);
  add_shift_range(shift, o);
  add_output(shift, o);

  auto* compare = app.add_subcommand("compare", "Compare measurements with a baseline");
  add_selection(compare, o, true);
  add_output(compare, o);
  compare->add_option("--baseline", o.baseline, "Baseline JSON")->required();
  compare->add_option("--input", o.input, "measurements.csv file or directory searched recursively (default: run)");

  auto* base = app.add_subcommand("baseline", "Record a baseline from a run or existing CSVs");
  add_selection(base, o, true);
  add_output(base, o);
  base->add_option("--baseline", o.baseline, "Baseline JSON to write")->required();
  base->add_option("--input", o.input, "measurements.csv file or directory searched recursively (default: run)");

  auto* report = app.add_subcommand("report", "HTML summary from existing artifacts");
  add_output(report, o);
  report->add_option("--input", o.input, "Artifact directory or measurements.csv")->required();
  report->add_option("--baseline", o.baseline, "Optional baseline for pass/fail badges");

  auto* ci = app.add_subcommand("ci-init", "Write a tiered CI pipeline and a starter baseline");
  add_selection(ci, o, false);
  ci->add_option("--mesh", o.mesh, "Mesh plan, comma separated (default 2,4,8,16,32)")->delimiter(',');
  add_output(ci, o);
  ci->add_option("--tag", o.tags, "Runner tag for an integrator as name=tag (repeatable)");
  ci->add_option("--default-tag", o.default_tag, "Runner tag for the remaining jobs");
  ci->add_option("--baseline", o.baseline, "Baseline path relative to the output (default ci/baseline.json)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  std::string command = "cutquad";
  for (std::size_t i = 1; i < args.size(); ++i) command += " " + args[i];

  try {
    if (list->parsed()) return cmd_list(o, out);
    Context ctx{out, err, command, resolve_output(o)};
    if (run->parsed()) return cmd_run(o, ctx);
    if (conv->parsed()) return cmd_convergence(o, ctx);
    if (shift->parsed()) return cmd_shift(o, ctx);
    if (compare->parsed()) return cmd_compare(o, ctx);
    if (base->parsed()) return cmd_baseline(o, ctx);
    if (report->parsed()) return cmd_report(o, ctx);
    if (ci->parsed()) return cmd_ci_init(o, ctx);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace cutquad
