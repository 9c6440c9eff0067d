#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specweave/pipeline.hpp"

namespace specweave {

/** A corpus entry, loaded once and shared read-only by all its runs. */
struct CorpusProgram
{
  std::string name;
  std::string path;
  SourceUnitPtr unit;
  std::optional<AssertionLocator> locator;
  /// Frontend rejected a construct; the program is reported as N/A.
  std::optional<std::string> unsupported;
  /// Any other load failure.
  std::optional<std::string> error;
};

/**
 * Target assertion for a program: an explicit line, then a `<stem>.assert`
 * sidecar holding a line number, then the only assertion of the unit.
 * Throws Error{AssertionNotFound}.
 */
AssertionLocator resolve_locator(const Program& program, const std::string& path,
                                 std::optional<std::size_t> line);

/** Every `*.c` file under root, sorted by path. */
std::vector<CorpusProgram> load_corpus(const std::string& root);

struct BatchSpec
{
  std::string corpus_root;
  int repeats = 5;
  RunConfig cfg;
};

struct ProgramResult
{
  std::string name;
  std::string path;
  std::string checksum;
  /// "ok", "N/A" or "error".
  std::string status = "ok";
  std::string note;
  std::vector<RunReport> runs;

  std::size_t successes() const;
  bool success() const { return successes() > 0; }
  /// `successes/repeats`, or "N/A".
  std::string ratio(int repeats) const;
  double mean_seconds() const;
  /// Sample standard deviation; 0 for fewer than two runs.
  double std_seconds() const;
};

struct BatchReport
{
  int repeats = 0;
  std::vector<ProgramResult> programs;
};

/** Reference implementation: one job after another. */
BatchReport run_batch(const BatchSpec& spec, Provider& provider, VerifierBackend& backend);

/**
 * Same jobs spread over `jobs` OpenMP threads; provider and backend must
 * tolerate concurrent calls. Results equal run_batch up to timings.
 */
BatchReport run_batch_parallel(const BatchSpec& spec, Provider& provider,
                               VerifierBackend& backend, int jobs);

enum class ReportFormat
{
  Json,
  Csv,
};

/// .csv selects Csv, anything else Json.
ReportFormat format_for_path(const std::string& path);

struct ReportOptions
{
  /// Without timings, identical runs give byte-identical reports.
  bool timings = true;
};

std::string format_run_report(const RunReport& report, ReportFormat format,
                              const ReportOptions& options = {});
std::string format_batch_report(const BatchReport& report, ReportFormat format,
                                const ReportOptions& options = {});
/** Fixed-width table in the style of a results table. */
std::string format_batch_table(const BatchReport& report, const ReportOptions& options = {});

/** `mean ± std` with two decimals. */
std::string format_mean_std(double mean, double std);

/** Writes text to path. Throws Error{IoError}. */
void write_file(const std::string& path, const std::string& text);

void emit_report(const RunReport& report, ReportFormat format, const std::string& path,
                 const ReportOptions& options = {});
void emit_report(const BatchReport& report, ReportFormat format, const std::string& path,
                 const ReportOptions& options = {});

/** Entry point of the command-line tool. */
int cli_main(int argc, char** argv);

}  // namespace specweave
