#include "cutquad/reporting.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "cutquad/version.hpp"

namespace cutquad {

namespace fs = std::filesystem;

std::string to_string(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::Csv: return "csv";
    case ArtifactKind::Json: return "json";
    case ArtifactKind::Svg: return "svg";
    case ArtifactKind::Html: return "html";
    case ArtifactKind::Yaml: return "yaml";
  }
  return "unknown";
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Manifest ---------------------------------------------------------------------

void ArtifactManifest::add(const fs::path& path, ArtifactKind kind, const std::string& command) {
  ManifestEntry e;
  const fs::path rel = path.lexically_relative(output_dir);
  e.path = (!rel.empty() && *rel.begin() != "..") ? rel : path;
  e.kind = kind;
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  e.bytes = ec ? 0 : size;
  e.command = command;
  entries.push_back(std::move(e));
}

void ArtifactManifest::validate() const {
  for (const auto& e : entries) {
    const fs::path p = e.path.is_absolute() ? e.path : output_dir / e.path;
    if (!fs::exists(p)) throw std::runtime_error("manifest lists missing file " + p.string());
    if (fs::file_size(p) == 0) throw std::runtime_error("manifest lists empty file " + p.string());
  }
}

std::string ArtifactManifest::to_json_text() const {
  nlohmann::ordered_json j;
  j["output_dir"] = output_dir.string();
  j["revision"] = code_revision();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    arr.push_back({{"path", e.path.generic_string()},
                   {"kind", to_string(e.kind)},
                   {"bytes", e.bytes},
                   {"command", e.command}});
  }
  j["artifacts"] = std::move(arr);
  return j.dump(2) + "\n";
}

fs::path ArtifactManifest::write() const {
  validate();
  const fs::path p = output_dir / "manifest.json";
  write_text_file(p, to_json_text());
  return p;
}

void ArtifactLayout::create() const {
  fs::create_directories(csv());
  fs::create_directories(plots());
  fs::create_directories(summary());
}

// CSV --------------------------------------------------------------------------

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string status_field(const Measurement& m) {
  if (m.status == Status::Failed && !m.message.empty()) return "failed: " + m.message;
  if (m.status == Status::Unsupported && !m.message.empty()) return "unsupported: " + m.message;
  return to_string(m.status);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false, pending = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    pending = true;
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      pending = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (in_quotes) throw std::invalid_argument("unterminated quoted CSV field");
  if (pending) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument(fmt::format("bad {} '{}'", what, s));
  }
  return v;
}

std::optional<double> parse_optional(const std::string& s, const char* what) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, what);
}

}  // namespace

std::string measurements_csv_text(const std::vector<Measurement>& measurements) {
  std::string out = kMeasurementsCsvHeader;
  out += '\n';
  for (const auto& m : measurements) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", quote(m.testcase_id), quote(m.integrator_name),
                       to_string(m.operation), m.mesh_divisions, num(m.value),
                       m.reference ? num(*m.reference) : "", m.rel_error ? num(*m.rel_error) : "",
                       m.n_points, num(m.runtime_s), quote(status_field(m)));
  }
  return out;
}

void write_measurements_csv(const std::vector<Measurement>& measurements, const fs::path& path) {
  write_text_file(path, measurements_csv_text(measurements));
}

std::vector<Measurement> measurements_from_csv_text(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw std::invalid_argument("CSV has no header");
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
  if (header != kMeasurementsCsvHeader) throw std::invalid_argument("unexpected CSV header: " + header);

  std::vector<Measurement> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    try {
      if (f.size() != 10) throw std::invalid_argument(fmt::format("expected 10 fields, got {}", f.size()));
      Measurement m;
      m.testcase_id = f[0];
      m.integrator_name = f[1];
      m.operation = operation_from_string(f[2]);
      m.mesh_divisions = static_cast<int>(parse_double(f[3], "divisions"));
      m.value = parse_double(f[4], "value");
      m.reference = parse_optional(f[5], "reference");
      m.rel_error = parse_optional(f[6], "rel_error");
      m.n_points = static_cast<std::size_t>(parse_double(f[7], "n_points"));
      m.runtime_s = parse_double(f[8], "runtime_s");
      const std::string& s = f[9];
      const auto colon = s.find(": ");
      const std::string head = s.substr(0, colon);
      if (head == "ok") m.status = Status::Ok;
      else if (head == "unsupported") m.status = Status::Unsupported;
      else if (head == "failed") m.status = Status::Failed;
      else throw std::invalid_argument("bad status '" + s + "'");
      if (colon != std::string::npos) m.message = s.substr(colon + 2);
      out.push_back(std::move(m));
    } catch (const std::exception& e) {
      throw std::invalid_argument(fmt::format("CSV line {}: {}", r + 1, e.what()));
    }
  }
  return out;
}

std::vector<Measurement> read_measurements_csv(const fs::path& path) {
  return measurements_from_csv_text(read_text_file(path));
}

void write_convergence_csv(const std::vector<ConvergenceTable>& tables, const fs::path& path) {
  std::string out = "testcase,integrator,operation,divisions,h,value,rel_error,n_points,status,order\n";
  for (const auto& t : tables) {
    for (const auto& row : t.rows) {
      const Measurement& m = row.measurement;
      out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", quote(t.testcase_id), quote(t.integrator_name),
                         to_string(t.operation), row.divisions, num(row.h), num(m.value),
                         m.rel_error ? num(*m.rel_error) : "", m.n_points, quote(status_field(m)),
                         t.order_text());
    }
  }
  write_text_file(path, out);
}

void write_shift_csv(const std::vector<ShiftSeries>& series, const fs::path& path) {
  std::string out = "testcase,integrator,operation,divisions,step,dx,dy,dz,value,rel_error,status\n";
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.measurements.size(); ++k) {
      const Measurement& m = s.measurements[k];
      const Point& o = s.offsets[k];
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", quote(s.testcase_id),
                         quote(s.integrator_name), to_string(s.operation), s.mesh_divisions, k, num(o[0]),
                         num(o[1]), num(o[2]), num(m.value), m.rel_error ? num(*m.rel_error) : "",
                         quote(status_field(m)));
    }
  }
  write_text_file(path, out);
}

// HTML -------------------------------------------------------------------------

namespace {

std::string escape_html(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.6e}", *v) : "-"; }

}  // namespace

std::string html_summary_text(const std::vector<Measurement>& measurements,
                              const ComparisonReport* comparison, const std::vector<fs::path>& plots,
                              const SummaryMetadata& meta) {
  std::map<std::tuple<std::string, std::string, Operation, int>, const EntryVerdict*> verdicts;
  if (comparison) {
    for (const auto& v : comparison->verdicts) {
      const auto& e = v.expected;
      verdicts[{e.testcase_id, e.integrator_name, e.operation, e.mesh_divisions}] = &v;
    }
  }

  std::size_t ok = 0, unsupported = 0, failed = 0, pass_badges = 0, fail_badges = 0;
  std::string rows;
  for (const auto& m : measurements) {
    std::string cls;
    switch (m.status) {
      case Status::Ok: ++ok; break;
      case Status::Unsupported: ++unsupported; cls = " class=\"unsupported\""; break;
      case Status::Failed: ++failed; cls = " class=\"failed\""; break;
    }
    std::string badge = "<td></td>";
    if (m.status == Status::Failed) {
      badge = "<td><span class=\"badge fail\">FAIL</span></td>";
      ++fail_badges;
    } else if (comparison) {
      auto it = verdicts.find({m.testcase_id, m.integrator_name, m.operation, m.mesh_divisions});
      if (it != verdicts.end()) {
        const bool pass = it->second->pass;
        badge = fmt::format("<td><span class=\"badge {}\" title=\"{}\">{}</span></td>", pass ? "pass" : "fail",
                            escape_html(it->second->reason), pass ? "PASS" : "FAIL");
        ++(pass ? pass_badges : fail_badges);
      }
    }
    rows += fmt::format(
        "<tr{}><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{:.17g}</td><td>{}</td><td>{}</td>"
        "<td>{}</td><td>{}</td>{}</tr>\n",
        cls, escape_html(m.testcase_id), escape_html(m.integrator_name), to_string(m.operation),
        m.mesh_divisions, m.value, fmt_opt(m.reference), fmt_opt(m.rel_error), m.n_points,
        escape_html(status_field(m)), badge);
  }
  if (comparison) {
    for (const auto& v : comparison->verdicts) {
      if (v.measured || v.pass) continue;
      const auto& e = v.expected;
      rows += fmt::format(
          "<tr class=\"missing\"><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>-</td><td>-</td><td>-</td>"
          "<td>-</td><td>{}</td><td><span class=\"badge fail\">FAIL</span></td></tr>\n",
          escape_html(e.testcase_id), escape_html(e.integrator_name), to_string(e.operation),
          e.mesh_divisions, escape_html(v.reason));
      ++fail_badges;
    }
  }

  std::string links;
  for (const auto& p : plots) {
    const std::string s = escape_html(p.generic_string());
    links += fmt::format("<li><a href=\"{}\">{}</a></li>\n", s, escape_html(p.filename().string()));
  }

  std::string html;
  html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  html += fmt::format("<title>{}</title>\n", escape_html(meta.title));
  html +=
      "<style>\n"
      "body{font-family:sans-serif;margin:2em}\n"
      "table{border-collapse:collapse}\n"
      "td,th{border:1px solid #ccc;padding:2px 6px;text-align:right}\n"
      "tr.unsupported td{color:#999;background:#f4f4f4}\n"
      "tr.failed td,tr.missing td{background:#fde8e8}\n"
      ".badge{padding:1px 6px;border-radius:3px;color:#fff;font-size:90%}\n"
      ".pass{background:#2a7d2a}\n"
      ".fail{background:#b22222}\n"
      "</style>\n</head>\n<body>\n";
  html += fmt::format("<h1>{}</h1>\n", escape_html(meta.title));
  // Only this line varies between otherwise identical runs.
  html += fmt::format("<p class=\"meta\">generated {} &middot; revision {}</p><!-- generated -->\n",
                      escape_html(meta.timestamp), escape_html(meta.revision));
  if (!meta.command.empty()) html += fmt::format("<p><code>{}</code></p>\n", escape_html(meta.command));
  html += fmt::format(
      "<p class=\"counts\">{} measurements: {} ok, {} unsupported, {} failed; {} pass, {} fail</p>\n",
      measurements.size(), ok, unsupported, failed, pass_badges, fail_badges);
  html +=
      "<table>\n<thead><tr><th>testcase</th><th>integrator</th><th>operation</th><th>divisions</th>"
      "<th>value</th><th>reference</th><th>rel_error</th><th>n_points</th><th>status</th><th>verdict</th>"
      "</tr></thead>\n<tbody>\n";
  html += rows;
  html += "</tbody>\n</table>\n";
  if (!links.empty()) html += "<h2>Plots</h2>\n<ul>\n" + links + "</ul>\n";
  html += "</body>\n</html>\n";
  return html;
}

void html_summary(const std::vector<Measurement>& measurements, const ComparisonReport* comparison,
                  const std::vector<fs::path>& plots, const fs::path& path, const SummaryMetadata& meta) {
  write_text_file(path, html_summary_text(measurements, comparison, plots, meta));
}

}  // namespace cutquad
