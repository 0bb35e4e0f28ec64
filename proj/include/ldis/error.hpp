#pragma once

#include <stdexcept>
#include <string>

namespace ldis {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Coordinates that cannot be interpreted (non-finite, out of range).
class GeometryError : public Error {
public:
    GeometryError(std::string site_id, std::size_t vertex, const std::string& what)
        : Error(what), site_id_(std::move(site_id)), vertex_(vertex) {}

    const std::string& site_id() const noexcept { return site_id_; }
    std::size_t vertex() const noexcept { return vertex_; }

private:
    std::string site_id_;
    std::size_t vertex_;
};

class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

class UnsupportedLatitude : public Error {
public:
    using Error::Error;
};

class AnnulusError : public Error {
public:
    using Error::Error;
};

class IngestError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DegeneratePanel : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

}  // namespace ldis
