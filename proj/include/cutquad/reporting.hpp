#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cutquad/baseline.hpp"
#include "cutquad/harness.hpp"

namespace cutquad {

enum class ArtifactKind { Csv, Json, Svg, Html, Yaml };
std::string to_string(ArtifactKind kind);

struct ManifestEntry {
  /// Relative to the manifest's output directory when inside it.
  std::filesystem::path path;
  ArtifactKind kind = ArtifactKind::Csv;
  std::uintmax_t bytes = 0;
  std::string command;
};

/// Index of every artifact a run produced; written to <out>/manifest.json.
struct ArtifactManifest {
  std::filesystem::path output_dir;
  std::vector<ManifestEntry> entries;

  /// Records `path` with its current size (0 when it does not exist yet).
  void add(const std::filesystem::path& path, ArtifactKind kind, const std::string& command);

  /// Throws std::runtime_error if a listed file is missing or empty.
  void validate() const;

  std::string to_json_text() const;
  /// Writes <output_dir>/manifest.json.
  std::filesystem::path write() const;
};

/// Output layout: <root>/csv, <root>/plots, <root>/summary.
struct ArtifactLayout {
  std::filesystem::path root;
  std::filesystem::path csv() const { return root / "csv"; }
  std::filesystem::path plots() const { return root / "plots"; }
  std::filesystem::path summary() const { return root / "summary"; }
  void create() const;
};

// CSV -------------------------------------------------------------------------

inline constexpr const char* kMeasurementsCsvHeader =
    "testcase,integrator,operation,divisions,value,reference,rel_error,n_points,runtime_s,status";

/// Exact schema, 17 significant digits, LF endings, header always present.
std::string measurements_csv_text(const std::vector<Measurement>& measurements);
void write_measurements_csv(const std::vector<Measurement>& measurements,
                            const std::filesystem::path& path);
std::vector<Measurement> measurements_from_csv_text(const std::string& text);
std::vector<Measurement> read_measurements_csv(const std::filesystem::path& path);

/// h, divisions and measurement columns for each row of each table.
void write_convergence_csv(const std::vector<ConvergenceTable>& tables,
                           const std::filesystem::path& path);
void write_shift_csv(const std::vector<ShiftSeries>& series, const std::filesystem::path& path);

// SVG -------------------------------------------------------------------------

inline constexpr int kInterfaceSamples = 256;

/// Mesh grid, one cross per quadrature point (class "qp"), and the interface
/// as a dashed red polyline of 256 samples. The viewBox is the domain and a
/// y-flip group keeps model coordinates verbatim in the markup. 2D only.
void plot_points_svg(const TestCase& tc, const CartesianMesh& mesh, const QuadratureData& quadrature,
                     const std::filesystem::path& path);
std::string points_svg_text(const TestCase& tc, const CartesianMesh& mesh,
                            const QuadratureData& quadrature);

inline constexpr double kPlotErrorFloor = 1e-16;

/// Log-log h vs rel_error; one polyline with markers per table, each marker
/// annotated with its point count, plus a legend.
void plot_convergence_svg(const std::vector<ConvergenceTable>& tables,
                          const std::filesystem::path& path);
std::string convergence_svg_text(const std::vector<ConvergenceTable>& tables);

/// Step index vs log rel_error, one polyline per series.
void plot_shift_svg(const std::vector<ShiftSeries>& series, const std::filesystem::path& path);
std::string shift_svg_text(const std::vector<ShiftSeries>& series);

// HTML ------------------------------------------------------------------------

struct SummaryMetadata {
  std::string title = "cutquad benchmark summary";
  std::string timestamp;
  std::string revision;
  std::string command;
};

/// Self-contained page: suite table, pass/fail badges when a comparison is
/// given, links to the plots. The timestamp sits on a single line marked
/// `<!-- generated -->`.
std::string html_summary_text(const std::vector<Measurement>& measurements,
                              const ComparisonReport* comparison,
                              const std::vector<std::filesystem::path>& plots,
                              const SummaryMetadata& meta);
void html_summary(const std::vector<Measurement>& measurements, const ComparisonReport* comparison,
                  const std::vector<std::filesystem::path>& plots, const std::filesystem::path& path,
                  const SummaryMetadata& meta);

/// Writes `text` with LF endings; creates parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace cutquad
