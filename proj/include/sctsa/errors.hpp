#pragma once

#include <stdexcept>
#include <string>

namespace sctsa {

// Error taxonomy; the CLI maps each class to a distinct exit code.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class budget_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sctsa
