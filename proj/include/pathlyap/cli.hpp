#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pathlyap/pathlyap.hpp"

// Command-line front end. Reports are JSON on the output stream, diagnostics go
// to the error stream, and the exit code is the verdict:
//
//    0  success (path-complete, verified, written)
//    2  malformed input or usage error
//    3  precondition not met (e.g. counterexample for a path-complete graph)
//   10  graph is not path-complete
//   11  verification failed
//   12  budget exhausted

namespace pathlyap::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_malformed = 2,
  exit_precondition = 3,
  exit_incomplete = 10,
  exit_verification_failed = 11,
  exit_budget = 12,
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::budget_exceeded: return exit_budget;
    case ErrorKind::verification_failed: return exit_verification_failed;
    case ErrorKind::not_path_complete:
    case ErrorKind::already_path_complete:
    case ErrorKind::cycle_detected: return exit_precondition;
    default: return exit_malformed;
  }
}

namespace detail {

using io::Json;

struct Input {
  std::string path;
  std::string text;
};

inline Input read_input(const std::string& path, std::istream& in) {
  Input input{path, {}};
  if (path == "-") {
    input.text.assign(std::istreambuf_iterator<char>(in), {});
    return input;
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::malformed_document, "cannot read '" + path + "'");
  input.text.assign(std::istreambuf_iterator<char>(f), {});
  return input;
}

inline std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline Json inputs_json(const std::vector<Input>& inputs) {
  Json j = Json::object();
  for (const auto& in : inputs) j[in.path] = "fnv1a64:" + fnv1a(in.text);
  return j;
}

inline std::size_t subset_budget(const std::optional<std::size_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PATHLYAP_BUDGET")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
      throw Error(ErrorKind::invalid_argument, "PATHLYAP_BUDGET must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return default_subset_budget;
}

inline void write_document(const Json& doc, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << doc.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::invalid_argument, "cannot write '" + path + "'");
  f << doc.dump(2) << "\n";
}

inline Json margins_json(const LabeledGraph& g, const VerificationReport& rep) {
  Json edges = Json::array();
  for (const auto& e : rep.edges) {
    const Edge& edge = g.edges()[e.edge];
    edges.push_back(Json{{"edge", e.edge},
                         {"from", g.nodes()[edge.from]},
                         {"to", g.nodes()[edge.to]},
                         {"label", io::word_json(g.alphabet(), edge.label)},
                         {"margin", e.margin},
                         {"threshold", e.threshold},
                         {"pass", e.pass}});
  }
  Json nodes = Json::array();
  for (const auto& n : rep.nodes)
    nodes.push_back(Json{{"node", g.nodes()[n.node]}, {"margin", n.margin}, {"threshold", n.threshold}, {"pass", n.pass}});
  Json out{{"verdict", rep.pass ? "pass" : "fail"}, {"delta", rep.delta}, {"edges", std::move(edges)},
           {"nodes", std::move(nodes)}};
  if (auto w = rep.worst_edge()) out["worst_edge"] = Json{{"edge", w->edge}, {"margin", w->margin}};
  else out["worst_edge"] = nullptr;
  return out;
}

class Timer {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

/// Parses argv and runs one subcommand. Never throws; every failure becomes
/// an exit code with a diagnostic on `err`.
inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  using detail::Json;
  CLI::App app{"Path-complete Lyapunov inequalities: validity checks and certificates", "pathlyap"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  std::optional<std::size_t> budget;
  std::uint64_t seed = 0;
  std::string output;

  auto add_budget = [&](CLI::App* sub) {
    sub->add_option("--budget", budget, "Subset budget (default 1e6, or PATHLYAP_BUDGET)");
  };

  auto* check = app.add_subcommand("check", "Decide path-completeness; exit 0 complete, 10 incomplete");
  check->add_option("graph", files, "Graph JSON")->required()->expected(1);
  add_budget(check);

  auto* missing = app.add_subcommand("missing-word", "Print the shortest missing word, or null");
  missing->add_option("graph", files, "Graph JSON")->required()->expected(1);
  add_budget(missing);

  std::vector<std::string> word_names;
  auto* cex = app.add_subcommand("counterexample", "Unstable set and integer certificate for a non-path-complete graph");
  cex->add_option("graph", files, "Graph JSON")->required()->expected(1);
  cex->add_option("--word", word_names, "Missing word to use (symbols, comma separated)")->delimiter(',');
  cex->add_option("-o,--output", output, "Write the bundle here instead of standard output");
  add_budget(cex);

  std::optional<double> delta;
  bool from_bundle = false;
  auto* verify = app.add_subcommand("verify", "Check a certificate: exit 0 pass, 11 fail");
  verify->add_option("files", files, "graph.json system.json certificate.json, or a bundle with --from-bundle");
  verify->add_flag("--from-bundle", from_bundle, "Read graph, system and certificate from one bundle (default stdin)");
  verify->add_option("--delta", delta, "Margin, relative to lambda_max of the node form");

  double tol = 1e-6;
  std::size_t depth = 6;
  std::size_t iterations = SolverOptions{}.iterations;
  auto* jsr = app.add_subcommand("jsr", "Lower and upper bounds on the joint spectral radius");
  jsr->add_option("files", files, "graph.json system.json")->required()->expected(2);
  jsr->add_option("--tol", tol, "Relative bisection tolerance");
  jsr->add_option("--depth", depth, "Word length for the lower bound");
  jsr->add_option("--iterations", iterations, "Solver iterations per bisection step");
  jsr->add_option("--seed", seed, "Solver seed");
  jsr->add_option("--delta", delta, "Verification margin");

  double gamma = 0.0;
  std::size_t product_budget = default_product_budget;
  std::size_t samples = 0;
  auto* inv = app.add_subcommand("invariant", "Common Lyapunov function from a certificate of the gamma-scaled set");
  inv->add_option("files", files, "graph.json system.json certificate.json")->required()->expected(3);
  inv->add_option("--gamma", gamma, "Scaling the certificate holds for (> 1)")->required();
  inv->add_option("--product-budget", product_budget, "Maximum number of materialized products");
  inv->add_option("--samples", samples, "Also sample the decrease condition this many times");
  inv->add_option("--seed", seed, "Sampling seed");
  inv->add_option("-o,--output", output, "Write the invariant here instead of standard output");

  std::optional<std::string> fresh;
  auto* red = app.add_subcommand("reduce", "Graph whose path-completeness is the automaton's universality");
  red->add_option("nfa", files, "NFA JSON")->required()->expected(1);
  red->add_option("--fresh", fresh, "Separator symbol (default f, renamed on collision)");
  red->add_option("-o,--output", output, "Write the graph here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "pathlyap: " << e.what() << "\n";
    return exit_malformed;
  }

  detail::Timer timer;
  try {
    if (check->parsed() || missing->parsed()) {
      const auto input = detail::read_input(files[0], in);
      const auto g = io::parse_graph(input.text);
      const auto pc = check_path_complete(g, detail::subset_budget(budget));
      Json report{{"command", check->parsed() ? "check" : "missing-word"},
                  {"inputs", detail::inputs_json({input})},
                  {"verdict", pc.complete ? "complete" : "incomplete"}};
      if (pc.complete) {
        report["missing_word"] = nullptr;
      } else {
        report["missing_word"] = io::word_json(g.alphabet(), pc.missing_word);
        report["missing_word_text"] = g.alphabet().to_text(pc.missing_word);
      }
      report["explored_subsets"] = pc.explored_subsets;
      report["expanded_states"] = pc.expanded_state_count;
      report["timing_ms"] = timer.elapsed_ms();
      out << report.dump(2) << "\n";
      if (!pc.complete) err << "not path-complete: cannot read '" << g.alphabet().to_text(pc.missing_word) << "'\n";
      if (missing->parsed()) return exit_ok;
      return pc.complete ? exit_ok : exit_incomplete;
    }

    if (cex->parsed()) {
      const auto input = detail::read_input(files[0], in);
      const auto g = io::parse_graph(input.text);
      Word w;
      if (!word_names.empty()) {
        w = g.alphabet().parse_word(word_names);
      } else {
        const auto pc = check_path_complete(g, detail::subset_budget(budget));
        if (pc.complete) throw Error(ErrorKind::already_path_complete, "no missing word, so no counterexample exists");
        w = pc.missing_word;
      }
      const auto bundle = synthesize_counterexample(g, w);
      const auto cert = bundle.certificate();
      const auto rep = verify_certificate(g, bundle.system, cert, default_delta);
      Json doc = io::bundle_json(g, bundle);
      Json verification{{"exact_pass", bundle.exact_pass}, {"quadratic", detail::margins_json(g, rep)}};
      try {
        const auto lb = jsr_lower_bound(bundle.system, bundle.sigma.dim);
        verification["jsr_lower_bound"] = lb.bound;
        verification["jsr_witness"] = io::word_json(g.alphabet(), lb.witness);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::budget_exceeded) throw;
        verification["jsr_lower_bound"] = nullptr;
      }
      doc["verification"] = std::move(verification);
      detail::write_document(doc, output, out);
      if (!output.empty() && output != "-")
        out << Json{{"command", "counterexample"}, {"inputs", detail::inputs_json({input})},
                    {"word", io::word_json(g.alphabet(), w)}, {"exact_pass", bundle.exact_pass},
                    {"quadratic_pass", rep.pass}, {"output", output}, {"timing_ms", timer.elapsed_ms()}}
                   .dump(2)
            << "\n";
      if (!rep.pass) err << "quadratic verification of the integer certificate failed\n";
      return bundle.exact_pass ? exit_ok : exit_verification_failed;
    }

    if (verify->parsed()) {
      std::vector<detail::Input> inputs;
      LabeledGraph g;
      MatrixSet s;
      Certificate c;
      double d = default_delta;
      Json extra = Json::object();
      if (from_bundle) {
        if (files.size() > 1) throw Error(ErrorKind::invalid_argument, "--from-bundle takes at most one file");
        inputs.push_back(detail::read_input(files.empty() ? "-" : files[0], in));
        const auto b = io::parse_bundle(io::parse_text(inputs[0].text));
        g = b.graph;
        s = b.system;
        c = b.certificate;
        // The system must be the transposed cycle family of the stated word.
        const auto expected = build_sigma_w(b.word, g.alphabet().size()).transposed(g.alphabet());
        bool matches = true;
        for (std::size_t k = 0; k < s.size(); ++k) matches = matches && s[k] == expected[k];
        extra["system_matches_word"] = matches;
        extra["word_readable"] = readable_bruteforce(g, b.word);
        if (!matches) err << "bundle system is not the cycle family of its word\n";
      } else {
        if (files.size() != 3) throw Error(ErrorKind::invalid_argument, "verify needs graph, system and certificate");
        for (const auto& f : files) inputs.push_back(detail::read_input(f, in));
        g = io::parse_graph(inputs[0].text);
        s = io::parse_matrix_set(io::parse_text(inputs[1].text), &g.alphabet());
        auto doc = io::parse_certificate(io::parse_text(inputs[2].text), g, s.dim());
        c = std::move(doc.certificate);
        d = doc.delta;
      }
      if (delta) d = *delta;
      const auto rep = verify_certificate(g, s, c, d);
      Json report{{"command", "verify"}, {"inputs", detail::inputs_json(inputs)}};
      for (auto it = extra.begin(); it != extra.end(); ++it) report[it.key()] = it.value();
      report["report"] = detail::margins_json(g, rep);
      report["timing_ms"] = timer.elapsed_ms();
      out << report.dump(2) << "\n";
      const bool ok = rep.pass && (!extra.contains("system_matches_word") || extra["system_matches_word"].get<bool>());
      if (!rep.pass) {
        if (auto w = rep.worst_edge()) err << "verification failed; worst edge " << w->edge << " margin " << w->margin << "\n";
        else err << "verification failed on a node form\n";
      }
      return ok ? exit_ok : exit_verification_failed;
    }

    if (jsr->parsed()) {
      std::vector<detail::Input> inputs{detail::read_input(files[0], in), detail::read_input(files[1], in)};
      const auto g = io::parse_graph(inputs[0].text);
      const auto s = io::parse_matrix_set(io::parse_text(inputs[1].text), &g.alphabet());
      BisectionOptions opts;
      opts.tol = tol;
      opts.lower_depth = depth;
      opts.solver.iterations = iterations;
      opts.solver.seed = seed;
      if (delta) opts.solver.delta = *delta;
      const auto b = gamma_star_bisection(g, s, opts);
      Json report{{"command", "jsr"},
                  {"inputs", detail::inputs_json(inputs)},
                  {"lower", b.lower},
                  {"lower_witness", io::word_json(g.alphabet(), b.lower_witness)},
                  {"upper", b.upper},
                  {"upper_is_smallest_verified_gamma_found", true},
                  {"upper_from_norm_bracket_only", b.upper_from_bracket_only},
                  {"bisection_steps", b.bisection_steps},
                  {"certificate_for_scaled_set", io::certificate_json(g, b.certificate, opts.solver.delta)},
                  {"timing_ms", timer.elapsed_ms()}};
      out << report.dump(2) << "\n";
      if (b.upper_from_bracket_only) err << "warning: no certificate found below the norm bracket\n";
      return exit_ok;
    }

    if (inv->parsed()) {
      std::vector<detail::Input> inputs;
      for (const auto& f : files) inputs.push_back(detail::read_input(f, in));
      const auto g = io::parse_graph(inputs[0].text);
      const auto s = io::parse_matrix_set(io::parse_text(inputs[1].text), &g.alphabet());
      const auto doc = io::parse_certificate(io::parse_text(inputs[2].text), g, s.dim());
      const auto f = build_invariant(g, s, gamma, doc.certificate, doc.delta, product_budget);
      Json result = io::invariant_json(g.alphabet(), f);
      std::optional<DecreaseReport> dec;
      if (samples > 0) {
        dec = check_decrease(f, s, samples, seed);
        result["decrease_check"] = Json{{"samples", dec->samples},
                                        {"violations", dec->violations},
                                        {"min_relative_gap", dec->min_relative_gap}};
      }
      detail::write_document(result, output, out);
      if (!output.empty() && output != "-")
        out << Json{{"command", "invariant"}, {"inputs", detail::inputs_json(inputs)}, {"r", f.horizon},
                    {"xi", f.xi}, {"products", f.product_count()}, {"output", output},
                    {"timing_ms", timer.elapsed_ms()}}
                   .dump(2)
            << "\n";
      return dec && !dec->pass() ? exit_verification_failed : exit_ok;
    }

    if (red->parsed()) {
      const auto input = detail::read_input(files[0], in);
      const auto nfa = io::parse_nfa(input.text);
      const auto g = reduce_universality(nfa, fresh);
      detail::write_document(io::graph_json(g), output, out);
      return exit_ok;
    }
  } catch (const Error& e) {
    err << "pathlyap: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "pathlyap: " << e.what() << "\n";
    return exit_malformed;
  }
  return exit_malformed;
}

}  // namespace pathlyap::cli
