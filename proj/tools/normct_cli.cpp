// Command-line front end. Talks to the library only through the C API:
// the problem spec travels as a JSON string, flags as a JSON object, and
// the report comes back as a JSON string.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "normct.h"

int main(int argc, char** argv) {
  CLI::App app{"norm-equation variety toolkit"};
  app.require_subcommand(1);

  std::string spec_path, T, Pmax, bound, precision, threads, out, cache_dir;
  bool csv = false;

  const std::vector<std::string> commands{
      "hilbert",      "components",  "search",        "solubility",
      "galois",       "brauer-gens", "pair",          "obstruction-demo",
      "torsor-build", "torsor-fiber", "density-count", "density-beta",
      "density-verify", "calibrate-ck"};
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("spec", spec_path, "problem spec JSON file")->required();
    sub->add_option("--T", T, "size parameter (count / calibration / sample point)");
    sub->add_option("--Pmax", Pmax, "largest prime for local densities");
    sub->add_option("--bound", bound, "search or height bound");
    sub->add_option("--precision", precision, "p-adic precision / extra density levels");
    sub->add_option("--threads", threads, "worker count (accepted; single-threaded)");
    sub->add_option("--out", out, "write the report here instead of stdout");
    sub->add_option("--cache-dir", cache_dir, "directory for density caches");
    sub->add_flag("--csv", csv, "emit the CSV table of a density report");
  }

  CLI11_PARSE(app, argc, argv);
  std::string command = app.get_subcommands().front()->get_name();

  std::ifstream in(spec_path);
  if (!in) {
    std::cerr << "cannot read spec file: " << spec_path << "\n";
    return 4;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  nlohmann::json flags = nlohmann::json::object();
  if (!T.empty()) flags["T"] = T;
  if (!Pmax.empty()) flags["Pmax"] = Pmax;
  if (!bound.empty()) flags["bound"] = bound;
  if (!precision.empty()) flags["precision"] = precision;
  if (!threads.empty()) flags["threads"] = threads;
  if (!cache_dir.empty()) flags["cache_dir"] = cache_dir;

  nv_ctx* ctx = nv_ctx_new();
  char* report = nullptr;
  int code = nv_run(ctx, command.c_str(), buf.str().c_str(), flags.dump().c_str(), &report);

  if (code == 4 || !report) {
    std::cerr << "error: " << nv_ctx_last_error(ctx) << "\n";
    nv_ctx_free(ctx);
    return 4;
  }

  std::string text = report;
  nv_string_free(report);
  nv_ctx_free(ctx);

  if (csv) {
    nlohmann::json parsed = nlohmann::json::parse(text);
    if (parsed["results"].contains("csv"))
      text = parsed["results"]["csv"].get<std::string>();
  }

  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(out);
    if (!os) {
      std::cerr << "cannot write: " << out << "\n";
      return 4;
    }
    os << text;
  }
  return code;
}
