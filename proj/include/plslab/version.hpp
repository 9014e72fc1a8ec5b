#pragma once

namespace plslab {

/// git-describe string captured at configure time.
const char* version_string();

}  // namespace plslab
