#pragma once

#include <functional>
#include <string>

namespace fairtopk {

// Library warnings go to stderr unless a sink is installed.
using WarningSink = std::function<void(const std::string&)>;

void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace fairtopk
