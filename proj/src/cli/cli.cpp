#include "sbdg/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "sbdg/charpoly.hpp"
#include "sbdg/solver.hpp"
#include "sbdg/spectral.hpp"

namespace sbdg::cli {

namespace {

const std::map<std::string, Integrator> kIntegrators{{"explicit", Integrator::explicit_rk},
                                                     {"implicit", Integrator::implicit_euler}};

std::string integrator_name(Integrator i) {
  return i == Integrator::implicit_euler ? "implicit" : "explicit";
}

std::string render_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void add_degree(CLI::App* sub, Options& o, std::vector<int> allowed) {
  sub->add_option("--p", o.p, "polynomial degree")->required()->check(CLI::IsMember(allowed));
}

void add_integrator(CLI::App* sub, Options& o) {
  sub->add_option("--integrator", o.integrator, "explicit or implicit")
      ->required()
      ->transform(CLI::CheckedTransformer(kIntegrators, CLI::ignore_case));
}

void add_out(CLI::App* sub, Options& o) { sub->add_option("--out", o.out, "CSV destination"); }

void add_raw_dt(CLI::App* sub, Options& o) {
  sub->add_flag("--raw-dt", o.raw_dt, "CFL values are dt/dx instead of normalised");
}

void build(CLI::App& app, Options& o) {
  app.require_subcommand(1, 1);

  auto* eigen = app.add_subcommand("eigen", "eigenvalues of M^-1 K");
  add_degree(eigen, o, {1, 2, 3});
  eigen->add_option("--cells", o.cells)->required()->check(CLI::Range(2, 64));
  eigen->add_option("--d", o.d, "d / dx")->required()->check(CLI::Range(-1.0, 1.0));
  eigen->add_flag("--periodic", o.periodic);
  add_out(eigen, o);

  auto* charpoly = app.add_subcommand("charpoly", "exact characteristic polynomial");
  add_degree(charpoly, o, {1, 2});
  charpoly->add_option("--cells", o.cells)->required()->check(CLI::IsMember({2, 3}));
  charpoly->add_option("--d", o.d_rational, "d / dx as a/b")->required();
  add_out(charpoly, o);

  auto* cflmax = app.add_subcommand("cfl-max", "periodic explicit CFL limit");
  add_degree(cflmax, o, {1, 2, 3});

  auto* map = app.add_subcommand("stability-map", "amplification over (d, CFL)");
  add_degree(map, o, {1, 2, 3});
  add_integrator(map, o);
  map->add_option("--d-min", o.d_min)->required()->check(CLI::Range(-1.0, 1.0));
  map->add_option("--d-max", o.d_max)->required()->check(CLI::Range(-1.0, 1.0));
  map->add_option("--cfl-max", o.cfl_max)->required()->check(CLI::PositiveNumber);
  map->add_option("--grid", o.grid)->required()->check(CLI::Range(2, 100000));
  map->add_option("--cells", o.cells, "cells in the analysis system")->check(CLI::Range(2, 64));
  add_raw_dt(map, o);
  add_out(map, o);

  auto* amplify = app.add_subcommand("amplify", "amplification along CFL at fixed d");
  add_degree(amplify, o, {1, 2, 3});
  add_integrator(amplify, o);
  amplify->add_option("--d", o.d)->required()->check(CLI::Range(-1.0, 1.0));
  amplify->add_option("--cfl-max", o.cfl_max)->required()->check(CLI::PositiveNumber);
  amplify->add_option("--samples", o.samples)->required()->check(CLI::Range(2, 10000000));
  amplify->add_option("--cells", o.cells)->check(CLI::Range(2, 64));
  add_raw_dt(amplify, o);
  add_out(amplify, o);

  auto* converge = app.add_subcommand("converge", "manufactured-solution convergence table");
  add_degree(converge, o, {1, 2, 3});
  converge->add_option("--d", o.d)->required()->check(CLI::Range(-1.0, 1.0));
  converge->add_option("--cfl", o.cfl)->required()->check(CLI::PositiveNumber);
  add_integrator(converge, o);
  converge->add_option("--meshes", o.meshes)->required()->delimiter(',')->check(
      CLI::Range(2, 1 << 20));
  add_raw_dt(converge, o);
  add_out(converge, o);

  auto* simulate = app.add_subcommand("simulate", "single run with per-cell samples");
  add_degree(simulate, o, {1, 2, 3});
  simulate->add_option("--d", o.d)->required()->check(CLI::Range(-1.0, 1.0));
  simulate->add_option("--cfl", o.cfl)->required()->check(CLI::PositiveNumber);
  simulate->add_option("--cells", o.cells)->required()->check(CLI::Range(2, 1 << 20));
  add_integrator(simulate, o);
  add_raw_dt(simulate, o);
  add_out(simulate, o);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

using Rows = std::vector<std::vector<std::string>>;

struct Table {
  std::vector<std::string> header;
  Rows rows;
};

Table run_eigen(const Options& o) {
  const GlobalSystem<double> sys = o.periodic ? assemble_periodic<double>(o.p, o.cells, 1.0)
                                              : analysis_system(o.p, o.d, o.cells);
  const Spectrum s = eigenvalues(sys);
  Table t{{"index", "re", "im"}, {}};
  for (Index i = 0; i < s.size(); ++i)
    t.rows.push_back({std::to_string(i), format_number(s.eigenvalues(i).real()),
                      format_number(s.eigenvalues(i).imag())});
  return t;
}

Table run_charpoly(const Options& o) {
  const CharPoly cp = char_poly_exact(o.p, o.cells, parse_rational(o.d_rational));
  Table t{{"power", "coefficient"}, {}};
  for (int k = 0; k <= cp.degree(); ++k)
    t.rows.push_back({std::to_string(k), cp.coefficients[k].get_str()});
  return t;
}

Table run_map(const Options& o) {
  StabilityMapOptions m;
  m.degree = o.p;
  m.integrator = o.integrator;
  m.d_min = o.d_min;
  m.d_max = o.d_max;
  m.cfl_min = 0.0;
  m.cfl_max = o.cfl_max;
  m.d_points = m.cfl_points = o.grid;
  m.n_elements = o.cells;
  m.raw_dt = o.raw_dt;
  const StabilityMap map = stability_map(m);
  Table t{{"d", "cfl", "rho", "stable", "marginal"}, {}};
  for (std::size_t i = 0; i < map.d_grid.size(); ++i)
    for (std::size_t j = 0; j < map.cfl_grid.size(); ++j)
      t.rows.push_back({format_number(map.d_grid[i]), format_number(map.cfl_grid[j]),
                        format_number(map.rho(i, j)), map.stable(i, j) ? "1" : "0",
                        map.marginal(i, j) ? "1" : "0"});
  return t;
}

Table run_amplify(const Options& o) {
  const auto curve = amplification_curve(o.p, o.integrator, o.d, linspace(0.0, o.cfl_max, o.samples),
                                         o.cells, o.raw_dt);
  Table t{{"cfl", "rho"}, {}};
  for (const CurvePoint& c : curve) t.rows.push_back({format_number(c.cfl), format_number(c.rho)});
  return t;
}

RunConfig run_config(const Options& o) {
  RunConfig c;
  c.degree = o.p;
  c.d_over_dx = o.d;
  c.cfl = o.cfl;
  c.integrator = o.integrator;
  c.raw_dt = o.raw_dt;
  c.n_elements = o.cells;
  return c;
}

Table run_converge(const Options& o) {
  const ConvergenceTable table = convergence_study(run_config(o), o.meshes);
  Table t{{"ne", "l2_error", "eoa"}, {}};
  for (const ConvergenceRow& r : table.rows)
    t.rows.push_back({std::to_string(r.n_elements), format_number(r.l2_error),
                      r.eoa ? format_number(*r.eoa) : std::string()});
  return t;
}

Table run_simulate(const Options& o) {
  const RunResult r = run_to_steady(run_config(o));
  const GlobalSystem<double>& sys = r.system;
  const ManufacturedCase mcase = ManufacturedCase::sine();
  const QuadratureRule rule = gauss_rule(o.p + 1);
  const std::string verdict = to_string(r.verdict);
  Table t{{"cell", "x", "u_h", "u_exact", "verdict"}, {}};
  for (int e = 0; e < sys.n_elements; ++e)
    for (double xi : rule.nodes) {
      const double x = physical_coordinate(sys, e, xi);
      t.rows.push_back({std::to_string(e), format_number(x),
                        format_number(evaluate(r.state.modes, sys, e, xi)),
                        format_number(mcase.exact(x)), verdict});
    }
  return t;
}

}  // namespace

std::string format_number(double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12e", value);
  return buf;
}

std::string to_csv(const std::vector<std::string>& header, const Rows& rows) {
  std::string s;
  auto line = [&s](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) s += ',';
      s += csv_field(fields[i]);
    }
    s += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return s;
}

Options parse(const std::vector<std::string>& args) {
  Options o;
  CLI::App app{"Shifted-boundary DG stability and convergence tools", "sbdg"};
  build(app, o);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError{app.help(), 0};
  } catch (const CLI::CallForAllHelp&) {
    throw UsageError{app.help("", CLI::AppFormatMode::All), 0};
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    throw UsageError{msg + "\n" + app.help(), int(ExitCode::usage)};
  }
  o.command = app.get_subcommands().front()->get_name();
  if (o.command == "stability-map" && o.d_min > o.d_max)
    throw UsageError{"--d-min must not exceed --d-max", int(ExitCode::usage)};
  if (o.command == "charpoly") {
    try {
      (void)parse_rational(o.d_rational);
    } catch (const std::exception& e) {
      throw UsageError{std::string("--d: ") + e.what(), int(ExitCode::usage)};
    }
    if (abs(parse_rational(o.d_rational)) > 1)
      throw UsageError{"--d: |d| must not exceed 1", int(ExitCode::usage)};
  }
  if (o.command == "converge")
    for (std::size_t i = 1; i < o.meshes.size(); ++i)
      if (o.meshes[i] != 2 * o.meshes[i - 1])
        throw UsageError{"--meshes: each mesh must double the previous one", int(ExitCode::usage)};
  return o;
}

std::vector<std::string> render(const Options& o) {
  std::vector<std::string> a{o.command, "--p", std::to_string(o.p)};
  auto add = [&a](const std::string& flag, const std::string& value) {
    a.push_back(flag);
    a.push_back(value);
  };
  auto out = [&] {
    if (!o.out.empty()) add("--out", o.out);
  };
  auto raw = [&] {
    if (o.raw_dt) a.push_back("--raw-dt");
  };
  const std::string integ = integrator_name(o.integrator);
  if (o.command == "eigen") {
    add("--cells", std::to_string(o.cells));
    add("--d", render_double(o.d));
    if (o.periodic) a.push_back("--periodic");
    out();
  } else if (o.command == "charpoly") {
    add("--cells", std::to_string(o.cells));
    add("--d", o.d_rational);
    out();
  } else if (o.command == "stability-map") {
    add("--integrator", integ);
    add("--d-min", render_double(o.d_min));
    add("--d-max", render_double(o.d_max));
    add("--cfl-max", render_double(o.cfl_max));
    add("--grid", std::to_string(o.grid));
    add("--cells", std::to_string(o.cells));
    raw();
    out();
  } else if (o.command == "amplify") {
    add("--integrator", integ);
    add("--d", render_double(o.d));
    add("--cfl-max", render_double(o.cfl_max));
    add("--samples", std::to_string(o.samples));
    add("--cells", std::to_string(o.cells));
    raw();
    out();
  } else if (o.command == "converge") {
    add("--d", render_double(o.d));
    add("--cfl", render_double(o.cfl));
    add("--integrator", integ);
    std::string list;
    for (std::size_t i = 0; i < o.meshes.size(); ++i)
      list += (i ? "," : "") + std::to_string(o.meshes[i]);
    add("--meshes", list);
    raw();
    out();
  } else if (o.command == "simulate") {
    add("--d", render_double(o.d));
    add("--cfl", render_double(o.cfl));
    add("--cells", std::to_string(o.cells));
    add("--integrator", integ);
    raw();
    out();
  }
  return a;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  try {
    o = parse(args);
  } catch (const UsageError& e) {
    (e.exit_code == 0 ? out : err) << e.message << (e.message.ends_with('\n') ? "" : "\n");
    return e.exit_code;
  }

  Table t;
  try {
    if (o.command == "cfl-max") {
      t = {{"p", "cfl_max"}, {{std::to_string(o.p), format_number(cfl_reference(o.p))}}};
    } else if (o.command == "eigen") {
      t = run_eigen(o);
    } else if (o.command == "charpoly") {
      t = run_charpoly(o);
    } else if (o.command == "stability-map") {
      t = run_map(o);
    } else if (o.command == "amplify") {
      t = run_amplify(o);
    } else if (o.command == "converge") {
      t = run_converge(o);
    } else if (o.command == "simulate") {
      t = run_simulate(o);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return int(ExitCode::failure);
  }

  const std::string text = to_csv(t.header, t.rows);
  if (o.out.empty()) {
    out << text;
    out.flush();
    return out ? int(ExitCode::success) : int(ExitCode::failure);
  }
  std::ofstream file(o.out, std::ios::binary);
  file << text;
  file.close();
  if (!file) {
    err << "error: cannot write " << o.out << "\n";
    return int(ExitCode::failure);
  }
  return int(ExitCode::success);
}

}  // namespace sbdg::cli
