#pragma once

#include <stdexcept>
#include <string>

namespace scriptclique {

// CLI exit codes: 0 success, 1 usage error, 2 data/integrity error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Corpus root has no readable manifest.
class CorpusNotFoundError : public Error {
public:
    using Error::Error;
};

// Manifest parses but violates the corpus schema (bad field, dangling id, ...).
class SchemaError : public Error {
public:
    using Error::Error;
};

// Stored content does not match its recorded digest, or a referenced file is gone.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Clique enumeration exceeded its recursion/work budget.
class BudgetExceededError : public Error {
public:
    using Error::Error;
};

} // namespace scriptclique
