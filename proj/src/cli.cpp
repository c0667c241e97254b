#include "ueassign/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ueassign/baseline.hpp"
#include "ueassign/error.hpp"
#include "ueassign/io.hpp"
#include "ueassign/physarum.hpp"

namespace ueassign::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

io::OutputFormat output_format(const RunRequest& req) {
  return req.format == "json" ? io::OutputFormat::json : io::OutputFormat::csv;
}

double default_epsilon(const Network& net) { return net.node_count() <= 10 ? 0.01 : 0.1; }

physarum::SolverConfig physarum_config(const RunRequest& req, const Network& net) {
  physarum::SolverConfig cfg;
  cfg.epsilon0 = req.epsilon0.value_or(default_epsilon(net));
  if (req.max_iter) cfg.max_iterations = *req.max_iter;
  cfg.rng_seed = req.seed;
  cfg.mode = req.algo == "zhang" ? physarum::Mode::aggregate : physarum::Mode::modified;
  return cfg;
}

baseline::FrankWolfeConfig fw_config(const RunRequest& req) {
  baseline::FrankWolfeConfig cfg;
  cfg.rgap_target = req.rgap_target;
  if (req.max_iter) cfg.max_iterations = *req.max_iter;
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  return f;
}

// Maps library errors onto exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const InfeasibleError& e) {
    err << "error: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << '\n';
    return kParse;
  } catch (const DomainError& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kParse;
  } catch (const DuplicateLinkError& e) {
    err << "error: parse: " << e.what() << '\n';
    return kParse;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  }
}

void print_report(const SolutionReport& r, const RunRequest& req, std::ostream& out) {
  if (output_format(req) == io::OutputFormat::json) {
    io::write_report(r, out);
    return;
  }
  out << "algorithm: " << r.algorithm << '\n'
      << "iterations: " << r.iterations << '\n'
      << "converged: " << (r.converged ? "true" : "false") << '\n'
      << "beckmann: " << num(r.beckmann) << '\n'
      << "rgap: " << (r.rgap ? num(*r.rgap) : std::string("n/a")) << '\n';
  if (!r.epsilon_history.empty())
    out << "final_epsilon: " << num(r.epsilon_history.back()) << '\n';
}

SolutionReport run_algorithm(const Problem& problem, const RunRequest& req,
                             std::ostream* history) {
  IterationObserver observer;
  if (history) {
    *history << "iteration,principle1_delta,rgap\n";
    observer = [&](const IterationRecord& rec) {
      const auto gap = baseline::relative_gap(problem, rec.flows);
      *history << rec.iteration << ',' << num(rec.principle1_delta) << ','
               << (gap ? num(*gap) : std::string()) << '\n';
    };
  }
  if (req.algo == "fw") return baseline::frank_wolfe(problem, fw_config(req), observer);
  return physarum::solve(problem, physarum_config(req, problem.network), observer);
}

}  // namespace

int cmd_solve(const RunRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::ParsedProblem problem = io::load_problem(req.links_path, req.trips_path);

    std::ofstream history_file;
    if (!req.history_path.empty()) history_file = open_output(req.history_path);
    const SolutionReport report =
        run_algorithm(problem, req, req.history_path.empty() ? nullptr : &history_file);
    if (history_file.is_open()) io::require_good(history_file, req.history_path);

    if (!req.out_path.empty()) {
      std::ofstream f = open_output(req.out_path);
      io::write_flows(problem.network, report.flows, report.travel_times, f, output_format(req));
    }
    print_report(report, req, out);

    if (!report.converged) {
      err << "warning: " << report.algorithm << " did not converge after " << report.iterations
          << " iterations\n";
      if (req.strict) return int{kNotConverged};
    }
    return int{kOk};
  });
}

int cmd_compare(const RunRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::ParsedProblem problem = io::load_problem(req.links_path, req.trips_path);
    const Network& net = problem.network;

    const SolutionReport phys = physarum::solve_ue(problem, physarum_config(req, net));
    const SolutionReport fw = baseline::frank_wolfe(problem, fw_config(req));
    const baseline::ErrorMetrics m = baseline::error_metrics(phys.flows, fw.flows);

    if (!req.out_path.empty()) {
      std::ofstream f = open_output(req.out_path);
      f << "from,to,physarum,fw,abs_diff,rel_diff\n";
      for (LinkIndex a = 0; a < net.link_count(); ++a) {
        const Link& l = net.link(a);
        const double diff = std::abs(phys.flows[a] - fw.flows[a]);
        f << l.tail + 1 << ',' << l.head + 1 << ',' << num(phys.flows[a]) << ','
          << num(fw.flows[a]) << ',' << num(diff) << ','
          << (fw.flows[a] > 0.0 ? num(diff / fw.flows[a]) : std::string()) << '\n';
      }
      io::require_good(f, req.out_path);
    }

    out << "physarum_iterations: " << phys.iterations << '\n'
        << "physarum_converged: " << (phys.converged ? "true" : "false") << '\n'
        << "fw_iterations: " << fw.iterations << '\n'
        << "epsilon_sum: " << num(m.epsilon_sum) << '\n'
        << "epsilon_rel_max: " << num(m.epsilon_rel_max) << '\n'
        << "rgap_physarum: " << (phys.rgap ? num(*phys.rgap) : std::string("n/a")) << '\n'
        << "rgap_fw: " << (fw.rgap ? num(*fw.rgap) : std::string("n/a")) << '\n';

    if (m.epsilon_rel_max > req.tolerance) {
      err << "flows differ: max relative error " << num(m.epsilon_rel_max) << " > tolerance "
          << num(req.tolerance) << '\n';
      return int{kNotConverged};
    }
    return int{kOk};
  });
}

int cmd_metrics(const RunRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::ParsedProblem problem = io::load_problem(req.links_path, req.trips_path);
    const auto read_flows = [&](const std::string& path) {
      std::ifstream f(path);
      if (!f) throw ParseError("cannot open " + path, 0);
      const io::OutputFormat fmt = std::filesystem::path(path).extension() == ".json"
                                       ? io::OutputFormat::json
                                       : io::OutputFormat::csv;
      return io::flows_for_network(problem.network, io::parse_flows(f, fmt));
    };
    const FlowVector x = read_flows(req.flows_path);
    std::optional<FlowVector> prev;
    if (!req.previous_flows_path.empty()) prev = read_flows(req.previous_flows_path);

    const baseline::GapReport report =
        prev ? baseline::gap_metrics(problem, x, std::span<const double>(*prev))
             : baseline::gap_metrics(problem, x);
    io::write_gap_report(report, out, output_format(req));
    return int{kOk};
  });
}

int cmd_shortest_path(const RunRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream f(req.links_path);
    if (!f) throw ParseError("cannot open " + req.links_path, 0);
    const Network net = io::parse_links(f, io::detect_format(req.links_path));
    if (req.source == 0 || req.sink == 0 || req.source > net.node_count() ||
        req.sink > net.node_count())
      throw DomainError("source and sink must be node ids in [1, " +
                        std::to_string(net.node_count()) + "]");

    physarum::SolverConfig cfg;
    cfg.mode = physarum::Mode::shortest_path;
    cfg.epsilon0 = req.epsilon0.value_or(1e-6);
    cfg.max_iterations = req.max_iter.value_or(20000);
    cfg.rng_seed = req.seed;
    const std::vector<double> lengths = net.free_flow_times();
    const auto result =
        physarum::shortest_path_flux(net, lengths, req.source - 1, req.sink - 1, cfg);

    out << "iterations: " << result.iterations << '\n'
        << "converged: " << (result.converged ? "true" : "false") << '\n'
        << "from,to,flux\n";
    for (LinkIndex a = 0; a < net.link_count(); ++a) {
      const Link& l = net.link(a);
      out << l.tail + 1 << ',' << l.head + 1 << ',' << num(result.flux[a]) << '\n';
    }
    if (!result.converged && req.strict) return int{kNotConverged};
    return int{kOk};
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"User-equilibrium traffic assignment with Physarum dynamics"};
  app.require_subcommand(1);
  RunRequest req;

  const auto add_problem = [&](CLI::App* sub) {
    sub->add_option("--links", req.links_path, "Network file (.tntp or .csv)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--trips", req.trips_path, "Trips file (.tntp or .csv)")
        ->required()
        ->check(CLI::ExistingFile);
  };
  const auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--epsilon", req.epsilon0,
                    "Physarum stopping threshold (default 0.01 for <= 10 nodes, else 0.1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", req.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
    sub->add_option("--seed", req.seed, "Conductivity seed")->envname("UEASSIGN_SEED");
    sub->add_option("--rgap", req.rgap_target, "Frank-Wolfe relative gap target")
        ->check(CLI::PositiveNumber);
  };
  const auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", req.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve the assignment and write link flows");
  add_problem(solve);
  add_solver(solve);
  add_format(solve);
  solve->add_option("--algo", req.algo, "physarum, fw or zhang")
      ->check(CLI::IsMember({"physarum", "fw", "zhang"}));
  solve->add_option("--out", req.out_path, "Flow table output");
  solve->add_option("--history", req.history_path, "Per-iteration history (csv)");
  solve->add_flag("--strict", req.strict, "Exit 3 when the solver does not converge");

  CLI::App* compare = app.add_subcommand("compare", "Compare Physarum against Frank-Wolfe");
  add_problem(compare);
  add_solver(compare);
  compare->add_option("--out", req.out_path, "Per-link diff table (csv)");
  compare->add_option("--tolerance", req.tolerance, "Accepted max relative difference")
      ->check(CLI::NonNegativeNumber);

  CLI::App* metrics = app.add_subcommand("metrics", "Convergence gaps of a flow table");
  add_problem(metrics);
  add_format(metrics);
  metrics->add_option("--flows", req.flows_path, "Flow table (.csv or .json)")
      ->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--previous", req.previous_flows_path, "Previous iterate's flow table")
      ->check(CLI::ExistingFile);

  CLI::App* sp = app.add_subcommand("shortest-path", "Physarum shortest path on static lengths");
  sp->add_option("--links", req.links_path, "Network file")->required()->check(CLI::ExistingFile);
  sp->add_option("--source", req.source, "Source node id")->required();
  sp->add_option("--sink", req.sink, "Sink node id")->required();
  sp->add_option("--epsilon", req.epsilon0, "Stopping threshold")->check(CLI::PositiveNumber);
  sp->add_option("--max-iter", req.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
  sp->add_option("--seed", req.seed, "Conductivity seed")->envname("UEASSIGN_SEED");
  sp->add_flag("--strict", req.strict, "Exit 3 when the solver does not converge");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  req.command = app.get_subcommands().front()->get_name();
  if (req.command == "solve") return cmd_solve(req, out, err);
  if (req.command == "compare") return cmd_compare(req, out, err);
  if (req.command == "metrics") return cmd_metrics(req, out, err);
  return cmd_shortest_path(req, out, err);
}

}  // namespace ueassign::cli
