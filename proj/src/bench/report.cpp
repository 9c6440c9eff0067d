#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specweave/bench.hpp"

namespace specweave {

using ordered_json = nlohmann::ordered_json;

std::string
format_mean_std(double mean, double std)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", mean, std);
  return buf;
}

ReportFormat
format_for_path(const std::string& path)
{
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0 ? ReportFormat::Csv
                                                                            : ReportFormat::Json;
}

void
write_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  }
  out << text;
  if (!out)
  {
    throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
  }
}

namespace {

ordered_json
times_json(const PhaseTimes& t)
{
  return ordered_json{{"query", t.query},
                      {"validate", t.validate},
                      {"simplify", t.simplify},
                      {"total", t.total()}};
}

ordered_json
run_json(const RunReport& r, const ReportOptions& options)
{
  ordered_json j;
  j["program"] = r.program;
  j["checksum"] = r.checksum;
  j["success"] = r.success;
  j["iterations_used"] = r.iterations_used;
  j["graph_nodes"] = r.graph_nodes;
  j["generated"] = r.generated;
  j["retained"] = r.retained;
  j["removed_by_simplify"] = r.removed_by_simplify;
  j["queries"] = r.queries;
  j["verifier_calls"] = r.verifier_calls;
  j["clauses"] = ordered_json::array();
  for (const FinalClause& c : r.clauses)
  {
    j["clauses"].push_back(ordered_json{{"owner", c.owner}, {"text", c.text}});
  }
  j["iterations"] = ordered_json::array();
  for (const IterationTrace& t : r.traces)
  {
    ordered_json it;
    it["iteration"] = t.iteration;
    it["adequacy"] = std::string(to_string(t.adequacy));
    it["nodes"] = ordered_json::array();
    for (const NodeTrace& n : t.nodes)
    {
      it["nodes"].push_back(ordered_json{{"node", n.node},
                                         {"kind", std::string(to_string(n.kind))},
                                         {"candidates", n.candidates},
                                         {"repeats_dropped", n.repeats_dropped},
                                         {"eliminated_illegal", n.eliminated_illegal},
                                         {"eliminated_unsat", n.eliminated_unsat},
                                         {"retained", n.retained},
                                         {"deferred", n.deferred},
                                         {"legality_checks", n.legality_checks},
                                         {"satisfiability_checks", n.satisfiability_checks}});
    }
    if (options.timings) it["times"] = times_json(t.times);
    j["iterations"].push_back(std::move(it));
  }
  if (options.timings)
  {
    j["times"] = times_json(r.times);
    j["total_seconds"] = r.total_seconds;
  }
  if (r.error)
  {
    j["error"] = *r.error;
    if (r.error_kind) j["error_kind"] = std::string(to_string(*r.error_kind));
  }
  j["final_text"] = r.final_text;
  return j;
}

std::string
csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s)
  {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string
fixed2(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string
join(const std::vector<std::string>& parts, const std::string& sep)
{
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i)
  {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string
iterations_of(const ProgramResult& p)
{
  std::vector<std::string> v;
  for (const RunReport& r : p.runs) v.push_back(r.success ? std::to_string(r.iterations_used) : "-");
  return join(v, " ");
}

std::string
generated_of(const ProgramResult& p)
{
  std::vector<std::string> v;
  for (const RunReport& r : p.runs) v.push_back(std::to_string(r.retained));
  return join(v, " ");
}

PhaseTimes
mean_times(const ProgramResult& p)
{
  PhaseTimes t;
  for (const RunReport& r : p.runs) t += r.times;
  if (!p.runs.empty())
  {
    double n = static_cast<double>(p.runs.size());
    t.query /= n;
    t.validate /= n;
    t.simplify /= n;
  }
  return t;
}

}  // namespace

std::string
format_run_report(const RunReport& report, ReportFormat format, const ReportOptions& options)
{
  if (format == ReportFormat::Json) return run_json(report, options).dump(2) + "\n";

  std::ostringstream out;
  out << "iteration,node,kind,candidates,repeats_dropped,eliminated_illegal,eliminated_unsat,"
         "retained,deferred,adequacy";
  if (options.timings) out << ",query,validate,simplify";
  out << "\n";
  for (const IterationTrace& t : report.traces)
  {
    for (const NodeTrace& n : t.nodes)
    {
      out << t.iteration << ',' << csv_field(n.node) << ',' << to_string(n.kind) << ','
          << n.candidates << ',' << n.repeats_dropped << ',' << n.eliminated_illegal << ','
          << n.eliminated_unsat << ',' << n.retained << ',' << n.deferred << ','
          << to_string(t.adequacy);
      if (options.timings)
      {
        out << ',' << fixed2(t.times.query) << ',' << fixed2(t.times.validate) << ','
            << fixed2(t.times.simplify);
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string
format_batch_report(const BatchReport& report, ReportFormat format, const ReportOptions& options)
{
  if (format == ReportFormat::Json)
  {
    ordered_json j;
    j["repeats"] = report.repeats;
    j["programs"] = ordered_json::array();
    for (const ProgramResult& p : report.programs)
    {
      ordered_json e;
      e["name"] = p.name;
      e["path"] = p.path;
      e["checksum"] = p.checksum;
      e["status"] = p.status;
      if (!p.note.empty()) e["note"] = p.note;
      e["success"] = p.success();
      e["ratio"] = p.ratio(report.repeats);
      e["runs"] = ordered_json::array();
      for (const RunReport& r : p.runs) e["runs"].push_back(run_json(r, options));
      if (options.timings && !p.runs.empty())
      {
        e["time_mean"] = p.mean_seconds();
        e["time_std"] = p.std_seconds();
        e["time"] = format_mean_std(p.mean_seconds(), p.std_seconds());
        e["phase_means"] = times_json(mean_times(p));
      }
      j["programs"].push_back(std::move(e));
    }
    return j.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "program,status,success,ratio,iterations,generated";
  if (options.timings) out << ",time_mean,time_std,query,validate,simplify";
  out << "\n";
  for (const ProgramResult& p : report.programs)
  {
    out << csv_field(p.name) << ',' << p.status << ',' << (p.success() ? "yes" : "no") << ','
        << p.ratio(report.repeats) << ',' << csv_field(iterations_of(p)) << ','
        << csv_field(generated_of(p));
    if (options.timings)
    {
      PhaseTimes t = mean_times(p);
      out << ',' << fixed2(p.mean_seconds()) << ',' << fixed2(p.std_seconds()) << ','
          << fixed2(t.query) << ',' << fixed2(t.validate) << ',' << fixed2(t.simplify);
    }
    out << "\n";
  }
  return out.str();
}

std::string
format_batch_table(const BatchReport& report, const ReportOptions& options)
{
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Program", "Success", "Ratio", "Iterations", "Generated"});
  if (options.timings) rows.front().push_back("Time (s)");
  std::size_t ok = 0;
  std::size_t counted = 0;
  for (const ProgramResult& p : report.programs)
  {
    std::vector<std::string> row = {p.name};
    if (p.status == "N/A")
    {
      row.insert(row.end(), {"N/A", "N/A", "N/A", "N/A"});
      if (options.timings) row.push_back("N/A");
    }
    else
    {
      ++counted;
      if (p.success()) ++ok;
      row.insert(row.end(), {p.status == "error" ? "error" : (p.success() ? "yes" : "no"),
                             p.ratio(report.repeats), iterations_of(p), generated_of(p)});
      if (options.timings) row.push_back(format_mean_std(p.mean_seconds(), p.std_seconds()));
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> width(rows.front().size(), 0);
  auto display = [](const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  };
  for (const auto& r : rows)
  {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], display(r[i]));
  }
  std::ostringstream out;
  for (const auto& r : rows)
  {
    for (std::size_t i = 0; i < r.size(); ++i)
    {
      out << r[i];
      if (i + 1 < r.size()) out << std::string(width[i] - display(r[i]) + 2, ' ');
    }
    out << "\n";
  }
  out << "Solved " << ok << "/" << counted << " (N/A excluded)\n";
  return out.str();
}

void
emit_report(const RunReport& report, ReportFormat format, const std::string& path,
            const ReportOptions& options)
{
  write_file(path, format_run_report(report, format, options));
}

void
emit_report(const BatchReport& report, ReportFormat format, const std::string& path,
            const ReportOptions& options)
{
  write_file(path, format_batch_report(report, format, options));
}

}  // namespace specweave
