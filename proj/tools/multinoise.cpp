// multinoise: batch front end for the gamma, rep-check, kernel-check and
// corr-check studies
//
//   multinoise <command> --config PATH [--out DIR] [--format csv|json] [--seed INT] [--force]
//
// Exit codes: 0 ok, 1 other failure, 2 config error, 3 support condition
// failed, 4 oracle mismatch, 5 invariant violation, 6 rate criterion failed.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>

#include <CLI11.hpp>

#include "multinoise/study.hpp"

namespace fs = std::filesystem;
using namespace multinoise;

namespace {

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Write next to the target, then rename over it.
void write_atomic(const fs::path& target, const std::string& content)
{
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

int run(const std::string& command, const StudyConfig& config, bool force)
{
    CommandOutcome outcome;
    if (command == "gamma")
        outcome = cmd_gamma(config, force);
    else if (command == "rep-check")
        outcome = cmd_rep_check(config);
    else if (command == "kernel-check")
        outcome = cmd_kernel_check(config, force);
    else
        outcome = cmd_corr_check(config, force);

    fs::path dir(config.out_dir);
    fs::create_directories(dir);
    for (const auto& a : outcome.artifacts) write_atomic(dir / a.name, a.content);
    std::cerr << outcome.summary << "\n";
    for (const auto& a : outcome.artifacts) std::cout << (dir / a.name).string() << "\n";
    return outcome.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"multinoise: multipole quantum noise studies"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    bool force = false;

    for (const char* name : {"gamma", "rep-check", "kernel-check", "corr-check"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "study configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
        sub->add_option("--format", format, "artifact format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "seed for randomized draws (overrides seed)");
        sub->add_flag("--force", force, "run even if the support condition fails");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_code::config;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        StudyConfig config = parse_config_text(read_file(config_path));
        if (out_dir) config.out_dir = *out_dir;
        if (format) config.format = *format;
        if (seed) config.seed = *seed;
        return run(command, config, force);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return exit_code::config;
    } catch (const SupportConditionFailed& e) {
        std::cerr << e.what() << "\n";
        return exit_code::support;
    } catch (const OracleMismatch& e) {
        std::cerr << e.what() << "\n";
        return exit_code::oracle;
    } catch (const ImaginaryResidue& e) {
        std::cerr << e.what() << "\n";
        return exit_code::invariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::failure;
    }
}
