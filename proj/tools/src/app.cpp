#include <map>
#include <memory>

#include "CLI11.hpp"
#include "geoaug/cli/commands.hpp"
#include "geoaug/error.hpp"

namespace geoaug::cli {

const std::vector<Command>& all_commands() {
  static const std::vector<Command> commands = [] {
    std::vector<Command> c{theorem1_command(),     curve_command(), augment_command(),
                           dro_check_command(),    oracle_suite_command(),
                           train_command(),        eval_command()};
    for (auto& cmd : c) cmd.keys.push_back({"seed", "0", "base random seed"});
    return c;
  }();
  return commands;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wasserstein-geodesic data augmentation and Gaussian robustness experiments",
               "geoaug"};
  app.require_subcommand(1);

  struct Bound {
    const Command* command;
    CLI::App* sub;
    std::string config_path;
    std::string out_dir = ".";
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (const auto& cmd : all_commands()) {
    auto b = std::make_unique<Bound>();
    b->command = &cmd;
    b->sub = app.add_subcommand(cmd.name, cmd.help);
    b->sub->add_option("--config", b->config_path, "key = value configuration file");
    b->sub->add_option("--out", b->out_dir, "output directory (created if missing)");
    for (const auto& k : cmd.keys) {
      b->options[k.key] = b->sub->add_option("--" + k.key, b->values[k.key],
                                             k.help + " [default: " + k.default_value + "]");
    }
    bound.push_back(std::move(b));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (const auto& b : bound) {
    if (!b->sub->parsed()) continue;
    try {
      Config config(b->command->name, b->command->keys);
      if (!b->config_path.empty()) config.load_file(b->config_path);
      for (const auto& [key, opt] : b->options) {
        if (opt->count() > 0) config.set(key, b->values.at(key));
      }
      std::filesystem::create_directories(b->out_dir);
      b->command->run(config, b->out_dir, out);
      return kExitOk;
    } catch (const UsageError& e) {
      err << "geoaug " << b->command->name << ": usage error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const InvalidArgument& e) {
      err << "geoaug " << b->command->name << ": invalid argument: " << e.what() << "\n";
      return kExitUsage;
    } catch (const ParseError& e) {
      err << "geoaug " << b->command->name << ": input error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const NumericalFailure& e) {
      err << "geoaug " << b->command->name << ": numerical failure: " << e.what() << "\n";
      return kExitNumerical;
    } catch (const CheckFailure& e) {
      err << "geoaug " << b->command->name << ": check failed: " << e.what() << "\n";
      return kExitCheckFailed;
    } catch (const std::exception& e) {
      err << "geoaug " << b->command->name << ": error: " << e.what() << "\n";
      return kExitError;
    }
  }
  return kExitUsage;
}

}  // namespace geoaug::cli
