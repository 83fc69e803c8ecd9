#pragma once

#include <string>
#include <vector>

#include "qrc/config.hpp"

namespace qrc {

// Executes the experiment named in settings.experiment and writes its CSV,
// SVG and manifest files into `out_dir`. `command` is recorded in the
// manifest verbatim. Returns the list of files written (manifest last).
std::vector<std::string> run_experiment(const Settings& settings, const std::string& out_dir,
                                        const std::vector<std::string>& command);

// Output directory resolution: explicit setting, else $QRC_OUT_DIR/<experiment>,
// else ./qrc_out/<experiment>.
std::string resolve_out_dir(const Settings& settings);

}  // namespace qrc
