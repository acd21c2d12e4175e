#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "arakelab/errors.hpp"
#include "arakelab/experiments.hpp"
#include "arakelab/parallel.hpp"
#include "arakelab/poly.hpp"
#include "arakelab/torus.hpp"

namespace arakelab::cli {

namespace {

const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> names = {
      {"mahler", Command::Mahler},   {"szego", Command::Szego},     {"volume", Command::Volume},
      {"h1", Command::H1},           {"stirling", Command::Stirling}, {"metrics", Command::Metrics},
      {"rr", Command::Rr},
  };
  return names;
}

const std::map<std::string, std::string>& command_help() {
  static const std::map<std::string, std::string> help = {
      {"mahler", "height target L(f) = integral of log|f|^2 over the torus"},
      {"szego", "normalized log det of the Toeplitz Gram of f against L(f)"},
      {"volume", "normalized deg, h0, h1 of the hypersurface quotient (three reports)"},
      {"h1", "h1 of the quotient against the ternary kernel bounds"},
      {"stirling", "normalized chi difference of standard lattices (needs --N, --d)"},
      {"metrics", "lp metric family against the canonical metric at degree --k"},
      {"rr", "normalized h0 - deg - h1 of the quotient"},
  };
  return help;
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw UsageError("--format must be csv or json, got '" + s + "'");
}

template <typename T>
T json_get(const nlohmann::json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config key '") + key + "': " + e.what());
  }
}

void apply_config_file(const std::string& path, RunConfig& cfg, bool& threads_set) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("config file " + path + ": expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key == "poly") {
      cfg.poly = json_get<std::string>(doc, "poly");
    } else if (key == "N") {
      cfg.N = json_get<int>(doc, "N");
    } else if (key == "d") {
      cfg.d = json_get<int>(doc, "d");
    } else if (key == "kmin") {
      cfg.kmin = json_get<long>(doc, "kmin");
    } else if (key == "kmax") {
      cfg.kmax = json_get<long>(doc, "kmax");
    } else if (key == "kstep") {
      cfg.kstep = json_get<long>(doc, "kstep");
    } else if (key == "k") {
      cfg.k = json_get<long>(doc, "k");
    } else if (key == "p") {
      cfg.p_list = json_get<std::vector<int>>(doc, "p");
    } else if (key == "precision") {
      cfg.precision_bits = json_get<long>(doc, "precision");
    } else if (key == "seed") {
      cfg.seed = json_get<std::uint64_t>(doc, "seed");
    } else if (key == "cap") {
      cfg.cap = json_get<std::size_t>(doc, "cap");
    } else if (key == "threads") {
      cfg.threads = json_get<unsigned>(doc, "threads");
      threads_set = true;
    } else if (key == "output") {
      cfg.output = json_get<std::string>(doc, "output");
    } else if (key == "format") {
      cfg.format = parse_format(json_get<std::string>(doc, "format"));
    } else if (key == "mode") {
      cfg.mode = json_get<std::string>(doc, "mode");
    } else if (key == "grid") {
      cfg.grid = json_get<long>(doc, "grid");
    } else if (key == "timings") {
      cfg.timings = json_get<bool>(doc, "timings");
    } else {
      throw UsageError("config file " + path + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [name, cmd] : command_names())
    if (cmd == c) return name;
  return "?";
}

void validate(const RunConfig& c) {
  if (c.kmin > c.kmax) throw UsageError("kmin must not exceed kmax");
  if (c.kmin < 0) throw UsageError("kmin must be >= 0");
  if (c.kstep < 1) throw UsageError("kstep must be >= 1");
  if (c.precision_bits < 64) throw UsageError("precision must be at least 64 bits");
  if (c.precision_bits > 1 << 20) throw UsageError("precision is unreasonably large");
  if (c.cap < 1000) throw UsageError("cap must be at least 1000");
  if (c.grid < 0) throw UsageError("grid must be >= 0");
  if (c.mode != "auto" && c.mode != "exact" && c.mode != "float") {
    throw UsageError("--mode must be auto, exact or float");
  }
  if (c.N && *c.N < 0) throw UsageError("N must be >= 0");
  if (c.d < 0) throw UsageError("d must be >= 0");
  for (int p : c.p_list)
    if (p < 1) throw UsageError("every p must be >= 1");
  if (c.command == Command::Stirling) {
    if (!c.N) throw UsageError("stirling needs --N");
  } else if (c.poly.empty()) {
    throw UsageError(to_string(c.command) + " needs --poly");
  }
  if (c.command == Command::Metrics && c.p_list.empty()) throw UsageError("metrics needs --p");
}

ParseResult parse_args(int argc, const char* const* argv, const std::map<std::string, std::string>& env,
                       std::ostream& out) {
  CLI::App app{"arakelab: arithmetic volume experiments for hypersurfaces in projective space"};
  app.set_version_flag("--version", "arakelab 0.1.0");
  app.fallthrough();

  RunConfig flags;
  std::string format = "csv";
  std::string config_path;
  int N = 0;
  auto* o_poly = app.add_option("--poly", flags.poly, "polynomial, e.g. \"x0+x1+x2\", or a JSON polynomial file");
  auto* o_N = app.add_option("--N", N, "variables are x0..xN (inferred from --poly when absent)");
  auto* o_d = app.add_option("--d", flags.d, "degree (stirling)");
  auto* o_kmin = app.add_option("--kmin", flags.kmin, "smallest k (default 1)");
  auto* o_kmax = app.add_option("--kmax", flags.kmax, "largest k (default 10)");
  auto* o_kstep = app.add_option("--kstep", flags.kstep, "k increment (default 1)");
  long k_single = 0;
  auto* o_k = app.add_option("--k", k_single, "degree for metrics (default kmax)");
  std::vector<int> p_list;
  auto* o_p = app.add_option("--p", p_list, "comma-separated exponents p for metrics")->delimiter(',');
  auto* o_prec = app.add_option("--precision", flags.precision_bits, "working precision in bits (default 128, >= 64)");
  auto* o_seed = app.add_option("--seed", flags.seed, "seed for quadrature phases and sampling (default 0)");
  auto* o_cap = app.add_option("--cap", flags.cap, "enumeration node budget (default 10^7, >= 10^3)");
  auto* o_threads = app.add_option("--threads", flags.threads, "worker threads, 0 = all cores (env ARAKELAB_THREADS)");
  auto* o_output = app.add_option("--output", flags.output, "report path; volume writes <stem>_deg/_h0/_h1");
  auto* o_format = app.add_option("--format", format, "csv or json (default csv)");
  auto* o_mode = app.add_option("--mode", flags.mode, "szego determinant mode: auto, exact or float");
  auto* o_grid = app.add_option("--grid", flags.grid, "quadrature nodes per outer axis (0 = default)");
  auto* o_timings = app.add_flag("--timings", flags.timings, "record runtime_ms (outputs are then not byte-stable)");
  app.add_option("--config", config_path, "JSON config file; flags override it");

  std::map<CLI::App*, Command> subs;
  for (const auto& [name, cmd] : command_names()) subs[app.add_subcommand(name, command_help().at(name))] = cmd;
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      std::ostringstream sink;
      app.exit(e, out, sink);
      return {std::nullopt, 0};
    }
    throw UsageError(e.what());
  }

  RunConfig cfg;
  bool threads_set = false;
  if (!config_path.empty()) apply_config_file(config_path, cfg, threads_set);
  for (const auto& [sub, cmd] : subs)
    if (sub->parsed()) cfg.command = cmd;

  if (o_poly->count()) cfg.poly = flags.poly;
  if (o_N->count()) cfg.N = N;
  if (o_d->count()) cfg.d = flags.d;
  if (o_kmin->count()) cfg.kmin = flags.kmin;
  if (o_kmax->count()) cfg.kmax = flags.kmax;
  if (o_kstep->count()) cfg.kstep = flags.kstep;
  if (o_k->count()) cfg.k = k_single;
  if (o_p->count()) cfg.p_list = p_list;
  if (o_prec->count()) cfg.precision_bits = flags.precision_bits;
  if (o_seed->count()) cfg.seed = flags.seed;
  if (o_cap->count()) cfg.cap = flags.cap;
  if (o_output->count()) cfg.output = flags.output;
  if (o_format->count()) cfg.format = parse_format(format);
  if (o_mode->count()) cfg.mode = flags.mode;
  if (o_grid->count()) cfg.grid = flags.grid;
  if (o_timings->count()) cfg.timings = flags.timings;
  if (o_threads->count()) {
    cfg.threads = flags.threads;
  } else if (auto it = env.find("ARAKELAB_THREADS"); it != env.end() && !it->second.empty()) {
    try {
      std::size_t used = 0;
      const long v = std::stol(it->second, &used);
      if (used != it->second.size() || v < 0) throw std::invalid_argument("bad");
      cfg.threads = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw UsageError("ARAKELAB_THREADS must be a non-negative integer, got '" + it->second + "'");
    }
  } else if (!threads_set) {
    cfg.threads = 0;
  }
  validate(cfg);
  return {cfg, 0};
}

std::vector<std::string> volume_paths(const std::string& output) {
  const std::filesystem::path p(output);
  const std::filesystem::path stem = p.parent_path() / p.stem();
  const std::string ext = p.extension().string();
  return {stem.string() + "_deg" + ext, stem.string() + "_h0" + ext, stem.string() + "_h1" + ext};
}

namespace {

HomogeneousPolynomial load_poly(const RunConfig& c) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(c.poly, ec)) {
    std::ifstream in(c.poly);
    std::stringstream buf;
    buf << in.rdbuf();
    return poly_from_json(buf.str());
  }
  if (!c.poly.empty() && c.poly.front() == '{') return poly_from_json(c.poly);
  return c.N ? parse_poly(c.poly, *c.N) : parse_poly(c.poly);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw Error("failed writing " + path);
}

std::string render(const ConvergenceReport& r, const RunConfig& c) {
  return c.format == Format::Csv ? report_to_csv(r, c.timings) : report_to_json(r, c.timings);
}

void print_summary(std::ostream& out, const ConvergenceReport& r) {
  out << r.label << "\n";
  out << "  normalization " << r.normalization << "; target " << r.target.to_string(10) << " ("
      << r.target_provenance << ")\n";
  for (const ReportTarget& t : r.alternative_targets) {
    out << "  alternative " << t.name << " " << t.value.to_string(10) << " (" << t.provenance << ")\n";
  }
  if (r.trend_only) out << "  trend-only\n";
  out << "  " << std::setw(6) << "k" << "  " << std::setw(18) << "value" << "  " << std::setw(18) << "target"
      << "  " << std::setw(10) << "err" << "\n";
  for (const ConvergencePoint& p : r.points) {
    out << "  " << std::setw(6) << p.k << "  " << std::setw(18) << p.value.to_string(12) << "  " << std::setw(18)
        << (p.target ? *p.target : r.target).to_string(12) << "  " << std::setw(10) << p.err.to_string(2) << "\n";
  }
  if (r.extrapolated) out << "  extrapolated (advisory) " << r.extrapolated->to_string(10) << "\n";
  for (const std::string& n : r.notes) out << "  note: " << n << "\n";
}

void emit(const ConvergenceReport& r, const RunConfig& c, std::ostream& out) {
  if (c.output.empty()) {
    out << render(r, c);
    return;
  }
  write_file(c.output, render(r, c));
  print_summary(out, r);
  out << "wrote " << c.output << "\n";
}

void emit_volume(const VolumeReports& v, const RunConfig& c, std::ostream& out) {
  const ConvergenceReport* reports[3] = {&v.degree, &v.h0, &v.h1};
  const char* names[3] = {"deg", "h0", "h1"};
  if (c.output.empty()) {
    if (c.format == Format::Csv) {
      for (int i = 0; i < 3; ++i) out << "# " << names[i] << "\n" << render(*reports[i], c);
    } else {
      nlohmann::ordered_json doc;
      doc["schema"] = 1;
      for (int i = 0; i < 3; ++i) doc[names[i]] = nlohmann::ordered_json::parse(render(*reports[i], c));
      out << doc.dump(2) << "\n";
    }
    return;
  }
  const auto paths = volume_paths(c.output);
  for (int i = 0; i < 3; ++i) {
    write_file(paths[static_cast<std::size_t>(i)], render(*reports[i], c));
    print_summary(out, *reports[i]);
    out << "wrote " << paths[static_cast<std::size_t>(i)] << "\n";
  }
}

int report_error(std::ostream& err, int code, const char* kind, const std::string& message,
                 const std::optional<std::string>& lower_bound = std::nullopt) {
  nlohmann::ordered_json e;
  e["kind"] = kind;
  e["message"] = message;
  e["exit_code"] = code;
  if (lower_bound) e["lower_bound"] = *lower_bound;
  nlohmann::ordered_json doc;
  doc["schema"] = 1;
  doc["error"] = std::move(e);
  err << doc.dump() << "\n";
  return code;
}

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  PrecisionGuard guard(c.precision_bits);
  ExperimentOptions opts;
  opts.precision_bits = c.precision_bits;
  opts.seed = c.seed;
  opts.cap = c.cap;
  opts.threads = resolve_threads(c.threads);
  opts.quadrature_grid = c.grid;
  const KRange ks{c.kmin, c.kmax, c.kstep};

  switch (c.command) {
    case Command::Mahler: {
      const HomogeneousPolynomial f = load_poly(c);
      QuadratureOptions q;
      q.precision_bits = c.precision_bits;
      q.grid = c.grid;
      q.seed = c.seed;
      q.threads = opts.threads;
      const QuadratureResult r = height_target(f, q);
      const std::string body = c.format == Format::Csv ? quadrature_to_csv(r) : quadrature_to_json(r, f);
      if (c.output.empty()) {
        out << body;
      } else {
        write_file(c.output, body);
        out << "L(" << to_string(f) << ") = " << r.value.to_string(20) << " +- " << r.est_error.to_string(3)
            << " (" << to_string(r.method) << ", grid " << r.grid << ")\n";
        out << "m(f) = L/2 = " << (r.value / Real(2L)).to_string(20) << "\n";
        out << "wrote " << c.output << "\n";
      }
      return kExitOk;
    }
    case Command::Szego: {
      const SzegoMode mode = c.mode == "exact" ? SzegoMode::Exact : c.mode == "float" ? SzegoMode::Float : SzegoMode::Auto;
      emit(szego_experiment(load_poly(c), ks, mode, opts), c, out);
      return kExitOk;
    }
    case Command::Volume:
      emit_volume(volume_experiment(load_poly(c), ks, opts), c, out);
      return kExitOk;
    case Command::H1: {
      const H1LemmaReport r = h1_lemma_experiment(load_poly(c), ks, opts);
      emit(r.report, c, out);
      if (!r.bounds_hold) {
        return report_error(err, kExitOther, "assertion", "h1 <= log ternary count <= log 3 * dim ker C_k violated");
      }
      return kExitOk;
    }
    case Command::Stirling:
      emit(stirling_experiment(*c.N, c.d, ks, opts), c, out);
      return kExitOk;
    case Command::Metrics: {
      const MetricFamilyReport r =
          metric_family_experiment(load_poly(c), static_cast<int>(c.k.value_or(c.kmax)), c.p_list, opts);
      emit(r.report, c, out);
      if (!r.proportionality_holds) {
        return report_error(err, kExitOther, "assertion", "lp gram is not proportional to the canonical gram");
      }
      return kExitOk;
    }
    case Command::Rr:
      emit(rr_discrepancy_experiment(load_poly(c), ks, opts), c, out);
      return kExitOk;
  }
  return kExitOther;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    return execute(config, out, err);
  } catch (const UsageError& e) {
    return report_error(err, kExitUsage, "usage", e.what());
  } catch (const ParseError& e) {
    return report_error(err, kExitParse, e.kind(), e.what());
  } catch (const CapExceeded& e) {
    return report_error(err, kExitCap, e.kind(), e.what(), e.lower_bound().get_str());
  } catch (const PrecisionFailure& e) {
    return report_error(err, kExitPrecision, e.kind(), e.what());
  } catch (const InvalidArgument& e) {
    return report_error(err, kExitDomain, e.kind(), e.what());
  } catch (const UnsupportedMetric& e) {
    return report_error(err, kExitDomain, e.kind(), e.what());
  } catch (const NotPositiveDefinite& e) {
    return report_error(err, kExitDomain, e.kind(), e.what());
  } catch (const RankDeficient& e) {
    return report_error(err, kExitDomain, e.kind(), e.what());
  } catch (const NotSaturated& e) {
    return report_error(err, kExitDomain, e.kind(), e.what());
  } catch (const Error& e) {
    return report_error(err, kExitOther, e.kind(), e.what());
  } catch (const std::exception& e) {
    return report_error(err, kExitOther, "internal", e.what());
  }
}

int main_entry(int argc, const char* const* argv, const std::map<std::string, std::string>& env,
               std::ostream& out, std::ostream& err) {
  ParseResult parsed;
  try {
    parsed = parse_args(argc, argv, env, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << " (see --help)\n";
    return report_error(err, kExitUsage, "usage", e.what());
  } catch (const ParseError& e) {
    return report_error(err, kExitParse, e.kind(), e.what());
  }
  if (!parsed.config) return parsed.exit_code;
  return run(*parsed.config, out, err);
}

}  // namespace arakelab::cli
