#include "cavernsim/error.hpp"
#include "cavernsim/scenarios.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>

using namespace cavernsim;

namespace {

enum ExitCode
{
  Ok = 0,
  Failure = 1,
  Invalid = 2,
  SolverFailed = 3,
  GateFailed = 4,
};

Scenario resolve_scenario(const std::string& ref)
{
  constexpr std::string_view prefix = "builtin:";
  if (ref.rfind(prefix, 0) == 0) {
    return builtin_scenario(ref.substr(prefix.size()));
  }
  return load_scenario_file(ref);
}

void print_warnings(const Scenario& s)
{
  for (const auto& w : s.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
}

int run_mms(const std::vector<int>& levels)
{
  const MmsReport report = run_mms_convergence(levels);
  print_mms_report(report, std::cout);
  return report.passed ? Ok : GateFailed;
}

void print_run_summary(const ScenarioRun& run)
{
  const auto& art = run.artifact;
  std::cout << "elements " << run.mesh.element_count() << ", nodes " << run.mesh.node_count() << '\n';
  std::cout << "steps " << art.iterations_per_step.size() << ", final t " << art.final_state.t << " day\n";
  if (!art.iterations_per_step.empty()) {
    std::cout << "max iterations per step "
              << *std::max_element(art.iterations_per_step.begin(), art.iterations_per_step.end()) << '\n';
  }
  if (!art.volumes.empty()) {
    const auto& first = art.volumes.front().caverns;
    const auto& last = art.volumes.back().caverns;
    for (std::size_t c = 0; c < first.size(); ++c) {
      std::cout << "cavern " << c << ": volume " << first[c].volume << " -> " << last[c].volume << " m^3, loss "
                << std::setprecision(4) << volume_loss_percent(first[c].volume, last[c].volume) << " %"
                << std::setprecision(6) << '\n';
    }
  }
  for (const auto& e : art.events) {
    if (e.kind != "step-cut") {
      std::cout << "t=" << e.t << " " << e.kind << ": " << e.message << '\n';
    }
  }
  const auto cuts = std::count_if(art.events.begin(), art.events.end(), [](const RunEvent& e) {
    return e.kind == "step-cut";
  });
  if (cuts > 0) {
    std::cout << cuts << " step(s) were subdivided to converge\n";
  }
  if (art.status == RunArtifact::Status::DamageFailure) {
    std::cout << "run halted: damage reached D* at t = " << art.final_state.t << " day\n";
  }
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Creep and damage simulation of salt caverns"};
  app.require_subcommand(1);

  std::string scenario_ref;
  std::string out_dir;
  std::string scheme;
  std::optional<double> dt;
  std::optional<double> t_end;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file or builtin:NAME");
  run_cmd->add_option("scenario", scenario_ref, "Scenario JSON file or builtin:NAME")->required();
  run_cmd->add_option("--out", out_dir, "Directory for probes.csv, volumes.csv, events.log and VTK snapshots");
  run_cmd->add_option("--scheme", scheme, "Time integration scheme")->check(CLI::IsMember({"explicit", "implicit"}));
  run_cmd->add_option("--dt", dt, "Time step [day]");
  run_cmd->add_option("--t-end", t_end, "End time [day]");

  std::string sweep_ref;
  std::vector<std::string> axes;
  bool cartesian = false;
  std::string sweep_out;
  unsigned threads = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run parameter variants of a scenario concurrently");
  sweep_cmd->add_option("scenario", sweep_ref, "Scenario JSON file or builtin:NAME")->required();
  sweep_cmd->add_option("--axis", axes, "PATH=v1,v2,... (repeatable)")->required();
  sweep_cmd->add_flag("--cartesian", cartesian, "Run every combination instead of one axis at a time");
  sweep_cmd->add_option("--out", sweep_out, "CSV file (default: stdout)");
  sweep_cmd->add_option("--threads", threads, "Worker count (default: CAVERNSIM_THREADS or all cores)");

  std::vector<int> levels{8, 16, 32, 64};
  auto* verify_cmd = app.add_subcommand("verify", "Verification gates");
  verify_cmd->require_subcommand(1);
  auto* mms_cmd = verify_cmd->add_subcommand("mms", "Manufactured-solution convergence study");
  mms_cmd->add_option("--levels", levels, "Elements per side of each refinement level")->delimiter(',');

  auto* mesh_cmd = app.add_subcommand("mesh", "Mesh generation and checking");
  mesh_cmd->require_subcommand(1);
  std::string gen_ref;
  std::string gen_out;
  auto* gen_cmd = mesh_cmd->add_subcommand("gen", "Generate the mesh of a scenario");
  gen_cmd->add_option("scenario", gen_ref, "Scenario JSON file or builtin:NAME")->required();
  gen_cmd->add_option("--out", gen_out, "Mesh file (default: stdout)");
  std::string check_file;
  auto* check_cmd = mesh_cmd->add_subcommand("check", "Load a mesh file and report statistics");
  check_cmd->add_option("file", check_file, "Mesh file")->required();

  auto* list_cmd = app.add_subcommand("list", "List builtin scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      Scenario s = resolve_scenario(scenario_ref);
      if (!scheme.empty()) {
        s.integrator.scheme = scheme == "explicit" ? Scheme::Explicit : Scheme::Implicit;
      }
      if (dt) {
        s.integrator.dt = *dt;
      }
      if (t_end) {
        s.integrator.t_end = *t_end;
      }
      s.warnings = validate(s);
      print_warnings(s);
      if (s.mode == "verify-mms") {
        return run_mms(levels);
      }
      const ScenarioRun run = run_scenario(s);
      print_run_summary(run);
      if (!out_dir.empty()) {
        write_run_outputs(out_dir, run.mesh, run.artifact, s.output);
        std::cout << "outputs written to " << out_dir << '\n';
      }
      return Ok;
    }
    if (*sweep_cmd) {
      const Scenario base = resolve_scenario(sweep_ref);
      print_warnings(base);
      std::vector<SweepAxis> parsed;
      for (const auto& a : axes) {
        parsed.push_back(parse_sweep_axis(a));
      }
      const SweepResult result =
        run_sweep(base, parsed, cartesian ? SweepMode::Cartesian : SweepMode::OneAtATime, threads);
      int status = Ok;
      for (const auto& v : result.variants) {
        if (!v.error.empty()) {
          std::cerr << "variant " << v.label << " failed: " << v.error << '\n';
          status = SolverFailed;
        }
      }
      if (sweep_out.empty()) {
        export_sweep_csv(result, std::cout);
      } else {
        std::ofstream out(sweep_out);
        export_sweep_csv(result, out);
        if (!out) {
          throw Error("cannot write " + sweep_out);
        }
        std::cerr << result.variants.size() << " variants written to " << sweep_out << '\n';
      }
      return status;
    }
    if (*mms_cmd) {
      return run_mms(levels);
    }
    if (*gen_cmd) {
      const Scenario s = resolve_scenario(gen_ref);
      const Mesh mesh = build_mesh(s);
      if (gen_out.empty()) {
        save_mesh(mesh, std::cout);
      } else {
        save_mesh_file(mesh, gen_out);
        std::cerr << mesh.element_count() << " elements written to " << gen_out << '\n';
      }
      return Ok;
    }
    if (*check_cmd) {
      const Mesh mesh = load_mesh_file(check_file);
      double min_area = std::numeric_limits<double>::infinity();
      double max_area = 0.0;
      for (int e = 0; e < mesh.element_count(); ++e) {
        min_area = std::min(min_area, mesh.element_area(e));
        max_area = std::max(max_area, mesh.element_area(e));
      }
      std::cout << "nodes " << mesh.node_count() << ", elements " << mesh.element_count() << ", boundary segments "
                << mesh.boundary().size() << ", probes " << mesh.probes().size() << '\n';
      std::cout << "element area " << min_area << " .. " << max_area << ", total " << mesh.total_area() << '\n';
      const auto loops = mesh.cavern_loops();
      std::cout << "cavern walls " << loops.size() << '\n';
      if (!loops.empty()) {
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(mesh.dof_count());
        const auto volumes = cavern_volume(mesh, zero);
        for (std::size_t c = 0; c < volumes.size(); ++c) {
          std::cout << "  cavern " << c << ": " << loops[c].nodes.size() << " wall nodes, area " << volumes[c].area
                    << " m^2, revolved volume " << volumes[c].volume << " m^3\n";
        }
      }
      return Ok;
    }
    if (*list_cmd) {
      for (const auto& name : builtin_scenario_names()) {
        std::cout << name << '\n';
      }
      return Ok;
    }
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    if (!e.trace().empty()) {
      std::cerr << "residual trace:";
      for (double r : e.trace()) {
        std::cerr << ' ' << r;
      }
      std::cerr << '\n';
    }
    return SolverFailed;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return Invalid;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return Invalid;
  } catch (const TopologyError& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return Invalid;
  } catch (const DegenerateElementError& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return Invalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Failure;
  }
  return Ok;
}
