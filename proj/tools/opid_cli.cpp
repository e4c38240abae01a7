#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "opid/errors.hpp"
#include "opid/report.hpp"

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void emit(std::ostream& os, const opid::CommandResult& result, opid::OutputFormat format) {
  if (format == opid::OutputFormat::json)
    os << opid::to_json(result, utc_timestamp()).dump(2) << '\n';
  else
    opid::write_csv(os, result.table);
}

// one line per check on stderr, so csv output stays a clean table
void summarize(const opid::CommandResult& result) {
  const auto& v = result.verdict;
  for (const auto& c : v.checks)
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << opid::format_double(c.measured) << ' '
              << c.relation << ' ' << opid::format_double(c.threshold) << (c.note.empty() ? "" : "  (" + c.note + ")")
              << '\n';
  std::cerr << v.command << ": " << opid::to_string(v.status) << (v.reason.empty() ? "" : " - " + v.reason) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator identity and factorization lab"};
  app.require_subcommand(1);

  std::string config_path, out_path, format_name;
  for (const auto& name : opid::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_path, "output file (defaults to config output.path, then stdout)");
    sub->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto cfg = opid::load_config(config_path);
    auto format = cfg.format;
    if (!format_name.empty()) format = format_name == "json" ? opid::OutputFormat::json : opid::OutputFormat::csv;
    if (out_path.empty() && cfg.output_path) out_path = *cfg.output_path;

    const auto result = opid::run_command(command, cfg);
    if (out_path.empty()) {
      emit(std::cout, result, format);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw opid::InvalidSpec("cannot open output file '" + out_path + "'");
      emit(out, result, format);
    }
    summarize(result);
    return result.verdict.exit_code();
  } catch (const opid::InvalidSpec& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << command << " failed: " << e.what() << '\n';
    return 1;
  }
}
