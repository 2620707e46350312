// tpfe: quadrature rules, mesh metrics and study runner.
//
//   tpfe rules --family gl --k 4
//   tpfe mesh --box 0,1,0,2 --div 4,8
//   tpfe study interp --d 1 --k 2 --l 3 --ladder 4,8,16,32,64 --format csv

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tpfe/geometry.hpp"
#include "tpfe/quadrature.hpp"
#include "tpfe/report_io.hpp"
#include "tpfe/studies.hpp"

namespace {

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

int cmd_rules(const std::string& family, int k, int d) {
  const auto rule = tpfe::make_rule(tpfe::node_family_from_string(family), k);
  const auto t = tpfe::tensorize(rule, d);
  nlohmann::json j;
  j["family"] = tpfe::to_string(rule.family);
  j["k"] = rule.k;
  j["d"] = d;
  j["nodes"] = nlohmann::json::array();
  for (const auto& x : t.nodes) j["nodes"].push_back(std::vector<double>(x.begin(), x.begin() + d));
  j["weights"] = t.weights;
  j["dop"] = tpfe::degree_of_precision(t);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_mesh(const std::string& box, const std::string& div) {
  const auto b = parse_doubles(box);
  const auto n = parse_doubles(div);
  if (b.size() % 2 != 0 || b.empty() || b.size() > 6) throw std::invalid_argument("--box needs 2, 4 or 6 values");
  const int d = static_cast<int>(b.size() / 2);
  if (static_cast<int>(n.size()) != 1 && static_cast<int>(n.size()) != d)
    throw std::invalid_argument("--div needs 1 or d values");
  tpfe::Point lo{}, hi{};
  std::array<int, tpfe::kMaxDim> dv{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    lo[a] = b[2 * a];
    hi[a] = b[2 * a + 1];
    dv[a] = static_cast<int>(n.size() == 1 ? n[0] : n[a]);
  }
  const auto mesh = tpfe::build_cartesian_mesh(d, lo, hi, dv);
  const auto m0 = tpfe::metrics(mesh.element(0));
  nlohmann::json j;
  j["dim"] = d;
  j["elements"] = mesh.size();
  j["h"] = mesh.h();
  j["sigma0"] = mesh.sigma0();
  j["c_qu"] = mesh.c_qu();
  j["element0"] = {{"h", m0.h}, {"rho", m0.rho}, {"sigma", m0.sigma}, {"volume", m0.volume}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor-product finite element estimates"};
  app.require_subcommand(1);

  auto* rules = app.add_subcommand("rules", "print a 1D quadrature rule");
  std::string family = "gl";
  int rk = 2, rd = 1;
  rules->add_option("--family", family, "gauss | gl | equispaced");
  rules->add_option("--k", rk, "degree");
  rules->add_option("--d", rd, "dimension")->check(CLI::Range(1, 3));

  auto* mesh = app.add_subcommand("mesh", "Cartesian mesh metrics");
  std::string box = "0,1", div = "4";
  mesh->add_option("--box", box, "x0,x1[,y0,y1[,z0,z1]]");
  mesh->add_option("--div", div, "n[,m[,l]]");

  auto* study = app.add_subcommand("study", "run a named study");
  std::string name, ladder, p = "", q = "", out, format = "json", fam;
  int d = -1, k = -1, bigK = -1, r = -1, l = -1, kmin = -1, kmax = -1, samples = -1;
  double tol = -1.0;
  std::string field;
  std::uint64_t seed = 0;
  bool seed_set = false;
  study->add_option("name", name, "study name")->required()->check(CLI::IsMember(tpfe::study_names()));
  study->add_option("--d", d, "dimension");
  study->add_option("--k", k, "polynomial degree");
  study->add_option("--bigK", bigK, "embedded degree K");
  study->add_option("--p", p, "integrability 1|2|4|6|inf");
  study->add_option("--q", q, "second integrability");
  study->add_option("--r", r, "derivative order");
  study->add_option("--l", l, "regularity order");
  study->add_option("--ladder", ladder, "divisions per axis, e.g. 4,8,16,32,64");
  study->add_option("--kmin", kmin, "k-sweep start");
  study->add_option("--kmax", kmax, "k-sweep end");
  study->add_option("--field", field, "sin | exp | sin-prod | rough");
  study->add_option("--family", fam, "gauss | gl | equispaced");
  study->add_option("--tol", tol, "slope tolerance");
  study->add_option("--samples", samples, "random samples per configuration");
  study->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_set = true; });
  study->add_option("--out", out, "output file (default stdout)");
  study->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rules) return cmd_rules(family, rk, rd);
    if (*mesh) return cmd_mesh(box, div);

    tpfe::StudyConfig c = tpfe::default_config(name);
    if (d > 0) c.d = d;
    if (k >= 0) c.k = k;
    if (bigK >= 0) c.K = bigK;
    if (r >= 0) c.r = r;
    if (l >= 0) c.l = l;
    if (!p.empty()) c.p = tpfe::parse_p(p);
    if (!q.empty()) c.q = tpfe::parse_p(q);
    if (!ladder.empty()) {
      c.ladder.clear();
      for (double v : parse_doubles(ladder)) c.ladder.push_back(static_cast<int>(v));
    }
    if (kmin > 0) c.k_min = kmin;
    if (kmax > 0) c.k_max = kmax;
    if (!field.empty()) c.field = field;
    if (!fam.empty()) c.family = tpfe::node_family_from_string(fam);
    if (tol > 0) c.tolerance = tol;
    if (samples > 0) c.samples = samples;
    if (seed_set) c.seed = seed;

    const auto rep = tpfe::run_study(c);
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty()) {
      file.open(out);
      if (!file) throw std::runtime_error("cannot open " + out);
      os = &file;
    }
    if (format == "csv")
      tpfe::write_csv(*os, rep);
    else
      *os << tpfe::report_to_json(rep).dump(2) << "\n";
    return rep.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
