// Command-line driver: single runs, reversibility experiments, convergence
// studies, and standalone SIAC filtering of saved snapshots.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dgvm/dgvm.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDivergence = 3;

struct CliOptions {
  std::string config_file;
  std::string case_name;
  int nx = 0;
  int nv = 0;
  int degree = 0;
  double cfl = -1.0;
  double tfinal = -1.0;
  int filter = -1;  // tri-state: unset / off / on
  std::string dt_mode;
  std::string out;
  long snapshot_every = -1;
  std::string meshes = "16,32,64";
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_file, "key = value config file");
  cmd->add_option("--case", opt.case_name, "landau | two_stream | weibel");
  cmd->add_option("--nx", opt.nx, "cells along x");
  cmd->add_option("--nv", opt.nv, "cells per velocity axis");
  cmd->add_option("--degree", opt.degree, "polynomial degree (1..3)");
  cmd->add_option("--cfl", opt.cfl, "CFL number (default per degree)");
  cmd->add_option("--tfinal", opt.tfinal, "final time");
  cmd->add_flag("--filter,!--no-filter", opt.filter,
                "apply the SIAC filter to outputs");
  cmd->add_option("--dt-mode", opt.dt_mode, "adaptive | frozen");
  cmd->add_option("--out", opt.out, "output directory");
  cmd->add_option("--snapshot-every", opt.snapshot_every,
                  "steps between snapshots (0 disables)");
}

dgvm::RunConfig build_config(const CliOptions& opt) {
  dgvm::RunConfig cfg;
  std::map<std::string, std::string> kv;
  if (!opt.config_file.empty()) {
    std::ifstream is(opt.config_file);
    if (!is)
      throw std::invalid_argument("cannot open config file " +
                                  opt.config_file);
    kv = dgvm::parse_key_values(is);
  }
  // CLI flags override file values.
  if (!opt.case_name.empty()) kv["case"] = opt.case_name;
  if (opt.nx > 0) kv["nx"] = std::to_string(opt.nx);
  if (opt.nv > 0) kv["nv"] = std::to_string(opt.nv);
  if (opt.degree > 0) kv["degree"] = std::to_string(opt.degree);
  if (opt.cfl >= 0.0) kv["cfl"] = std::to_string(opt.cfl);
  if (opt.tfinal >= 0.0) kv["tfinal"] = std::to_string(opt.tfinal);
  if (opt.filter >= 0) kv["filter"] = opt.filter ? "true" : "false";
  if (!opt.dt_mode.empty()) kv["dt_mode"] = opt.dt_mode;
  if (!opt.out.empty()) kv["out"] = opt.out;
  if (opt.snapshot_every >= 0)
    kv["snapshot_every"] = std::to_string(opt.snapshot_every);
  dgvm::apply_config(kv, cfg);
  return cfg;
}

std::map<std::string, std::string> snapshot_meta(const dgvm::RunConfig& cfg,
                                                 double t) {
  std::ostringstream ts;
  ts.precision(17);
  ts << t;
  return {{"case", dgvm::to_string(cfg.bench)},
          {"t", ts.str()},
          {"config", dgvm::serialize_config(cfg)}};
}

void write_state_snapshot(const dgvm::SimulationState& state,
                          const dgvm::RunConfig& cfg, const fs::path& path) {
  dgvm::write_snapshot(path.string(),
                       {{"f", &state.f}, {"fields", &state.fields}},
                       snapshot_meta(cfg, state.t));
}

int cmd_run(const CliOptions& opt) {
  const dgvm::RunConfig cfg = build_config(opt);
  const dgvm::SystemKind kind = cfg.kind();
  fs::create_directories(cfg.out_dir);

  dgvm::SimulationState state = dgvm::make_initial_state(cfg);
  std::ofstream diag(fs::path(cfg.out_dir) / "diagnostics.csv");
  diag << "step,t,mass,l2f,energy,mean_e\n";
  diag.precision(16);

  const dgvm::StepObserver observer = [&](const dgvm::SimulationState& s,
                                          long step) {
    const dgvm::ConservedQuantities c = dgvm::conserved_quantities(s, kind);
    diag << step << ',' << s.t << ',' << c.mass << ',' << c.l2f << ','
         << c.energy << ',' << c.mean_e << '\n';
    if (cfg.snapshot_every > 0 && step > 0 && step % cfg.snapshot_every == 0)
      write_state_snapshot(
          s, cfg,
          fs::path(cfg.out_dir) / ("state_" + std::to_string(step) + ".snap"));
  };

  state = dgvm::run(std::move(state), kind, cfg.controls(), observer);
  write_state_snapshot(state, cfg, fs::path(cfg.out_dir) / "final.snap");

  if (cfg.filter) {
    const dgvm::SiacKernel ker = dgvm::make_kernel(cfg.degree, state.f.mesh());
    const dgvm::FilteredSample fs_f = dgvm::postprocess_field(state.f, ker);
    std::ofstream os(fs::path(cfg.out_dir) / "filtered_f.txt");
    os << "# columns: x v... f_filtered\n";
    fs_f.write_columns(os);
  }
  std::cout << "run complete: t = " << state.t << ", outputs in "
            << cfg.out_dir << "\n";
  return 0;
}

void print_report(const dgvm::ErrorReport& rep) {
  std::cout << "mesh " << rep.nx << "x" << rep.nv << " degree " << rep.degree
            << " T " << rep.t_final << " steps " << rep.n_steps << " dt "
            << rep.dt << "\n";
  for (const auto& q : rep.quantities) {
    std::cout << "  " << q.name << ": L2 " << q.l2 << "  Linf " << q.linf;
    if (rep.filtered)
      std::cout << "  |  filtered: L2 " << q.l2_post << "  Linf "
                << q.linf_post;
    std::cout << "\n";
  }
}

int cmd_reverse(const CliOptions& opt) {
  const dgvm::RunConfig cfg = build_config(opt);
  fs::create_directories(cfg.out_dir);
  const dgvm::ErrorReport rep = dgvm::reversibility_experiment(cfg);
  print_report(rep);
  dgvm::ConvergenceTable table;
  table.rows.push_back(rep);
  dgvm::emit_table(table, (fs::path(cfg.out_dir) / "report.csv").string());
  dgvm::write_table_sidecar(
      table, (fs::path(cfg.out_dir) / "report_full.txt").string(),
      {{"config", dgvm::serialize_config(cfg)}});
  return 0;
}

int cmd_converge(const CliOptions& opt) {
  const dgvm::RunConfig cfg = build_config(opt);
  fs::create_directories(cfg.out_dir);
  std::vector<int> meshes;
  std::stringstream ss(opt.meshes);
  for (std::string tok; std::getline(ss, tok, ',');)
    meshes.push_back(std::stoi(tok));
  if (meshes.empty()) throw std::invalid_argument("empty mesh list");

  const auto flush = [&](const dgvm::ConvergenceTable& t) {
    dgvm::emit_table(t, (fs::path(cfg.out_dir) / "table.csv").string());
    dgvm::write_table_sidecar(
        t, (fs::path(cfg.out_dir) / "table_full.txt").string(),
        {{"config", dgvm::serialize_config(cfg)}});
  };
  dgvm::ConvergenceTable table;
  try {
    table = dgvm::run_convergence_study(cfg, meshes, flush);
  } catch (...) {
    std::cerr << "study aborted; partial table flushed to " << cfg.out_dir
              << "\n";
    throw;
  }
  for (const auto& row : table.rows) print_report(row);
  dgvm::emit_table(table, std::cout);
  return 0;
}

int cmd_filter(const std::string& snapshot_path, const CliOptions& opt) {
  const dgvm::Snapshot snap = dgvm::read_snapshot(snapshot_path);
  const std::string out_dir = opt.out.empty() ? "." : opt.out;
  fs::create_directories(out_dir);
  for (const auto& [name, field] : snap.fields) {
    const dgvm::SiacKernel ker =
        dgvm::make_kernel(field.degree(), field.mesh());
    for (int c = 0; c < field.n_comp(); ++c) {
      const dgvm::FilteredSample sample =
          dgvm::postprocess_field(field, ker, 0, c);
      std::string fname = "filtered_" + name;
      if (field.n_comp() > 1) fname += "_c" + std::to_string(c);
      std::ofstream os(fs::path(out_dir) / (fname + ".txt"));
      os << "# columns: coordinates then filtered value\n";
      sample.write_columns(os);
    }
  }
  std::cout << "filtered fields written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DG solver for reduced Vlasov-Ampere / Vlasov-Maxwell systems "
               "with SIAC post-processing"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string snapshot_path;

  CLI::App* run = app.add_subcommand("run", "integrate a benchmark to T");
  add_common_flags(run, opt);
  CLI::App* rev =
      app.add_subcommand("reverse", "time-reversibility error experiment");
  add_common_flags(rev, opt);
  CLI::App* conv =
      app.add_subcommand("converge", "reversibility study over meshes");
  add_common_flags(conv, opt);
  conv->add_option("--meshes", opt.meshes, "comma-separated cell counts");
  CLI::App* filt =
      app.add_subcommand("filter", "apply the SIAC filter to a snapshot");
  filt->add_option("snapshot", snapshot_path, "snapshot file")->required();
  filt->add_option("--out", opt.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return cmd_run(opt);
    if (rev->parsed()) return cmd_reverse(opt);
    if (conv->parsed()) return cmd_converge(opt);
    if (filt->parsed()) return cmd_filter(snapshot_path, opt);
  } catch (const dgvm::DivergenceError& e) {
    std::cerr << "numerical divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return 0;
}
