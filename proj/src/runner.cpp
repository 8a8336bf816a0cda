#include "carnotflow/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

namespace carnotflow {

namespace {

std::string layer_filename(const std::string& dir, int k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "layer_%04d.csv", k);
  return dir + "/" + buf;
}

}  // namespace

SolveArtifacts run_solve(const RunConfig& cfg, int threads, const std::string& out_dir) {
  const auto t_start = std::chrono::steady_clock::now();
  const GroupDescriptor g = GroupDescriptor::parse(cfg.group_name);
  const OperatorDescriptor op = make_operator(cfg.operator_name, g.horizontal_dim());
  const InitialDatum datum = make_initial_datum(cfg.data, g);
  auto grid = std::make_shared<const Grid>(Box{cfg.box_lo, cfg.box_hi, cfg.box_h}, g);

  const std::string dir = out_dir.empty() ? cfg.output.dir : out_dir;
  std::filesystem::create_directories(dir);

  SolveArtifacts art;
  RadialProfile profile;
  const Vec center = identity_point(g);
  int excluded_total = 0;
  double warn_radius = 10.0 * cfg.box_h.minCoeff();

  auto on_layer = [&](const ValueLayer& layer, int k) {
    if (k % cfg.output.stride == 0) {
      const std::string path = layer_filename(dir, k);
      write_layer_csv(layer, path);
      art.layer_files.push_back(path);
    }
    if (cfg.output.track_level_set) {
      int excluded = 0;
      double r = std::numeric_limits<double>::quiet_NaN();
      try {
        r = measure_zero_level_radius(layer, center, cfg.output.n_rays, &excluded);
      } catch (const std::runtime_error&) {
        excluded = cfg.output.n_rays;
      }
      excluded_total += excluded;
      profile.times.push_back(layer.t);
      profile.measured.push_back(r);
      const auto ex = exact_radius(cfg, g, layer.t);
      profile.exact.push_back(ex ? *ex : std::numeric_limits<double>::quiet_NaN());
      if (std::isfinite(r)) {
        const double margin =
            std::min(cfg.box_hi(0) - r, std::min(cfg.box_hi(1) - r, r));
        if (margin < warn_radius)
          std::fprintf(stderr,
                       "warning: tracked level set within 10 cells of the constancy shell "
                       "(t=%.6g, r=%.6g)\n",
                       layer.t, r);
        art.final_radius = r;
      }
    }
  };

  art.result = solve(cfg.game, op, g, grid, datum.fn, datum.far_field, threads, on_layer);
  art.box_breaches = art.result.diag.box_breaches;
  art.excluded_rays = excluded_total;

  if (cfg.output.track_level_set) {
    art.profile_file = dir + "/profile.csv";
    write_profile_csv(profile, art.profile_file);
  }

  art.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  const std::string canonical = cfg.canonical();
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  art.manifest_file = dir + "/manifest.txt";
  std::FILE* mf = std::fopen(art.manifest_file.c_str(), "w");
  if (!mf) throw std::runtime_error("cannot write manifest: " + art.manifest_file);
  std::fprintf(mf, "config_hash = %s\n", hash);
  std::fprintf(mf, "threads = %d\n", threads);
  std::fprintf(mf, "wall_seconds = %.3f\n", art.wall_seconds);
  std::fprintf(mf, "box_breach_samples = %llu\n",
               static_cast<unsigned long long>(art.box_breaches));
  std::fprintf(mf, "excluded_rays = %d\n", art.excluded_rays);
  std::fprintf(mf, "layers = %zu\n", art.layer_files.size());
  for (const auto& f : art.layer_files) std::fprintf(mf, "layer_file = %s\n", f.c_str());
  if (!art.profile_file.empty())
    std::fprintf(mf, "profile_file = %s\n", art.profile_file.c_str());
  std::fprintf(mf, "[config]\n%s", canonical.c_str());
  std::fclose(mf);
  return art;
}

double pil_interior_error(const ValueLayer& layer, double r2_lo, double r2_hi,
                          double boundary_margin) {
  const Grid& grid = *layer.grid;
  const Box& box = grid.box();
  double err = 0.0;
  for (std::int64_t f = 0; f < grid.node_count(); ++f) {
    const Vec p = grid.node_point(f);
    bool near_face = false;
    for (int k = 0; k < grid.dim(); ++k)
      if (p(k) < box.lo(k) + boundary_margin || p(k) > box.hi(k) - boundary_margin)
        near_face = true;
    if (near_face) continue;
    const double r2 = p(0) * p(0) + p(1) * p(1);
    if (r2 < r2_lo || r2 > r2_hi) continue;
    err = std::max(err, std::abs(layer.values(f) - pil_exact(layer.t, p)));
  }
  return err;
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const std::string& parameter,
                                const std::vector<double>& values, int threads,
                                const std::string& out_dir) {
  if (parameter != "epsilon" && parameter != "h")
    throw ConfigError("sweep parameter must be epsilon or h");
  if (values.empty()) throw ConfigError("sweep needs at least one value");

  const GroupDescriptor g = GroupDescriptor::parse(base.group_name);
  const std::string dir = out_dir.empty() ? base.output.dir : out_dir;
  std::filesystem::create_directories(dir);

  std::vector<SweepRow> rows;
  std::vector<ValueLayer> finals;
  for (double v : values) {
    RunConfig cfg = base;
    cfg.output.track_level_set = false;
    if (parameter == "epsilon") {
      cfg.game.epsilon = v;
    } else {
      Vec h(cfg.box_h.size());
      h.setConstant(v);
      cfg.box_h = h;
    }
    const OperatorDescriptor op = make_operator(cfg.operator_name, g.horizontal_dim());
    const InitialDatum datum = make_initial_datum(cfg.data, g);
    auto grid = std::make_shared<const Grid>(Box{cfg.box_lo, cfg.box_hi, cfg.box_h}, g);
    SolveResult sr = solve(cfg.game, op, g, grid, datum.fn, datum.far_field, threads);
    const ValueLayer& last = sr.layers.back();

    SweepRow row;
    row.value = v;
    row.t_final = last.t;
    if (const auto ex = exact_radius(cfg, g, last.t)) {
      const double r = measure_zero_level_radius(last, identity_point(g), base.output.n_rays);
      row.oracle_error = std::abs(r - *ex);
    } else if (cfg.operator_name == "pil" && g.kind() == GroupKind::Heisenberg) {
      row.oracle_error = pil_interior_error(last, 0.25, 0.81);
    }
    if (!finals.empty()) {
      // successive difference, sampled at the coarser of the two grids
      const ValueLayer& prev = finals.back();
      const Grid& coarse =
          prev.grid->node_count() <= last.grid->node_count() ? *prev.grid : *last.grid;
      double diff = 0.0;
      for (std::int64_t f = 0; f < coarse.node_count(); ++f) {
        const Vec p = coarse.node_point(f);
        diff = std::max(diff, std::abs(sample(prev, p) - sample(last, p)));
      }
      row.successive_diff = diff;
    }
    finals.push_back(last);
    rows.push_back(row);
  }

  std::FILE* f = std::fopen((dir + "/sweep.csv").c_str(), "w");
  if (!f) throw std::runtime_error("cannot write sweep.csv");
  std::fprintf(f, "%s,t_final,oracle_error,successive_diff\n", parameter.c_str());
  for (const SweepRow& r : rows)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", r.value, r.t_final, r.oracle_error,
                 r.successive_diff);
  std::fclose(f);
  return rows;
}

}  // namespace carnotflow
