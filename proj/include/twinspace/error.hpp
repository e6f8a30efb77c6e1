#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twinspace {

// Base for every error raised by the library. Messages name the offending
// field, column, row or id so they can be surfaced to users unchanged.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row) : Error(what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// Settings documents that fail validation. `path` is a JSON-pointer-like
// location such as "/tour/d".
class SchemaError : public Error {
public:
    SchemaError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class NotFound : public Error {
public:
    using Error::Error;
};

class Cancelled : public Error {
public:
    Cancelled() : Error("cancelled") {}
};

} // namespace twinspace
