#include <map>

#include "mimoq/runner.hpp"

namespace mimoq {

namespace {

// Bundled experiment definitions, one or two runs per figure id.
const std::map<std::string, std::vector<std::pair<std::string, std::string>>>&
figure_table() {
  static const std::map<std::string,
                        std::vector<std::pair<std::string, std::string>>>
      t = {
          {"fig3",
           {{"fig3",
             "[geometry]\n"
             "type = none\n"
             "[analysis]\n"
             "type = capacity\n"
             "[solver]\n"
             "w_values = 0.01, 0.1, 1, 10, 100\n"
             "q_values = 1\n"
             "gamma_values = 2, 20, 200\n"
             "[output]\n"
             "prefix = fig3\n"}}},
          {"fig4",
           {{"fig4",
             "[geometry]\n"
             "type = dipole-pair\n"
             "[analysis]\n"
             "type = modes\n"
             "[sweep]\n"
             "parameter = spacing\n"
             "start = 0.05\n"
             "stop = 2.0\n"
             "points = 40\n"
             "[output]\n"
             "prefix = fig4\n"}}},
          {"fig5",
           {{"fig5",
             "[geometry]\n"
             "type = dipole-pair\n"
             "spacing = 0.3\n"
             "[analysis]\n"
             "type = ergodic\n"
             "[solver]\n"
             "gamma = 20\n"
             "q_start = 2\n"
             "q_stop = 200\n"
             "q_points = 25\n"
             "realizations = 500\n"
             "seed = 1\n"
             "[output]\n"
             "prefix = fig5\n"}}},
          {"fig6",
           {{"fig6 distance sweep",
             "[geometry]\n"
             "type = dipole-pair\n"
             "[analysis]\n"
             "type = capacity\n"
             "[sweep]\n"
             "parameter = spacing\n"
             "start = 0.05\n"
             "stop = 2.0\n"
             "points = 40\n"
             "[solver]\n"
             "gamma = 20\n"
             "q_start = 1\n"
             "q_stop = 1000\n"
             "q_points = 60\n"
             "[output]\n"
             "prefix = fig6_distance\n"},
            {"fig6 rotation study",
             "[geometry]\n"
             "type = dipole-pair\n"
             "spacing = 0.3\n"
             "[analysis]\n"
             "type = capacity\n"
             "[sweep]\n"
             "parameter = rotation\n"
             "start = 0\n"
             "stop = 1.5707963267948966\n"
             "points = 13\n"
             "[solver]\n"
             "gamma = 20\n"
             "q_start = 1\n"
             "q_stop = 1000\n"
             "q_points = 60\n"
             "[output]\n"
             "prefix = fig6_rotation\n"}}},
          {"fig7",
           {{"fig7",
             "[geometry]\n"
             "type = plate\n"
             "[analysis]\n"
             "type = modes\n"
             "[sweep]\n"
             "parameter = ka\n"
             "start = 0.2\n"
             "stop = 1.0\n"
             "points = 17\n"
             "[solver]\n"
             "n_modes = 8\n"
             "[output]\n"
             "prefix = fig7\n"}}},
          {"fig8a",
           {{"fig8a",
             "[geometry]\n"
             "type = dipole-array\n"
             "spacing = 0.3\n"
             "[analysis]\n"
             "type = capacity\n"
             "[sweep]\n"
             "parameter = count\n"
             "values = 1,2,3,4,5,6,7,8,9,10\n"
             "[solver]\n"
             "gamma = 20\n"
             "q_start = 1\n"
             "q_stop = 10000\n"
             "q_points = 40\n"
             "[output]\n"
             "prefix = fig8a\n"}}},
          {"fig8b",
           {{"fig8b",
             "[geometry]\n"
             "type = dipole-array\n"
             "spacing = 0.5\n"
             "[analysis]\n"
             "type = capacity\n"
             "[sweep]\n"
             "parameter = count\n"
             "values = 1,2,3,4,5,6,7,8,9,10\n"
             "[solver]\n"
             "gamma = 20\n"
             "q_start = 1\n"
             "q_stop = 10000\n"
             "q_points = 40\n"
             "[output]\n"
             "prefix = fig8b\n"}}},
          {"fig8c",
           {{"fig8c",
             "[geometry]\n"
             "type = dipole-array\n"
             "spacing = 0.7\n"
             "[analysis]\n"
             "type = capacity\n"
             "[sweep]\n"
             "parameter = count\n"
             "values = 1,2,3,4,5,6,7,8,9,10\n"
             "[solver]\n"
             "gamma = 20\n"
             "q_start = 1\n"
             "q_stop = 10000\n"
             "q_points = 40\n"
             "[output]\n"
             "prefix = fig8c\n"}}},
          {"fig9",
           {{"fig9",
             "[geometry]\n"
             "type = plate-subregion\n"
             "ka = 1.0\n"
             "cells_x = 40\n"
             "cells_y = 20\n"
             "[analysis]\n"
             "type = modes\n"
             "[sweep]\n"
             "parameter = case\n"
             "cases = full, A, B, C, D, E\n"
             "[solver]\n"
             "n_modes = 8\n"
             "[output]\n"
             "prefix = fig9\n"}}},
          {"fig10",
           {{"fig10",
             "[geometry]\n"
             "type = plate\n"
             "ka = 1.0\n"
             "[analysis]\n"
             "type = ergodic\n"
             "[solver]\n"
             "gamma = 20\n"
             "q_start = 3\n"
             "q_stop = 300\n"
             "q_points = 20\n"
             "realizations = 500\n"
             "seed = 1\n"
             "[output]\n"
             "prefix = fig10\n"}}},
          {"fig11",
           {{"fig11",
             "[geometry]\n"
             "type = plate-subregion\n"
             "ka = 1.0\n"
             "cells_x = 40\n"
             "cells_y = 20\n"
             "[analysis]\n"
             "type = capacity\n"
             "[sweep]\n"
             "parameter = case\n"
             "cases = full, A, B, C, D, E\n"
             "[solver]\n"
             "gamma = 20\n"
             "q_start = 1\n"
             "q_stop = 10000\n"
             "q_points = 40\n"
             "[output]\n"
             "prefix = fig11\n"}}},
      };
  return t;
}

}  // namespace

std::vector<std::string> known_figures() {
  std::vector<std::string> out;
  for (const auto& [id, _] : figure_table()) out.push_back(id);
  return out;
}

std::vector<std::pair<std::string, std::string>> bundled_configs(
    const std::string& figure_id) {
  const auto it = figure_table().find(figure_id);
  if (it == figure_table().end())
    throw ConfigError("unknown figure id: " + figure_id);
  return it->second;
}

RunReport reproduce_figure(const std::string& figure_id,
                           const RunOptions& opt) {
  RunReport all;
  for (const auto& [name, text] : bundled_configs(figure_id)) {
    const Config cfg = Config::parse_string(text, name);
    RunReport r = run_experiment(cfg, opt);
    all.outputs.insert(all.outputs.end(), r.outputs.begin(), r.outputs.end());
    if (!all.summary_json.empty()) all.summary_json += "\n";
    all.summary_json += r.summary_json;
  }
  return all;
}

}  // namespace mimoq
