#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tsfrac {

enum class errc {
    point_not_in_scale,
    empty_range,
    invalid_scale,
    invalid_argument,
    syntax_error,
    unknown_identifier,
    domain_error,
    not_differentiable,
    negative_point_with_fractional_alpha,
    nonpositive_point_with_fractional_alpha,
    zero_limit_undetermined,
    quadrature_failure,
    not_monotone,
    image_not_representable,
    invalid_exponent,
    function_vanishes,
    zero_weight_mass,
    shape_indeterminate,
    negative_weight,
};

constexpr std::string_view to_string(errc code) noexcept
{
    switch (code) {
    case errc::point_not_in_scale: return "PointNotInScale";
    case errc::empty_range: return "EmptyRange";
    case errc::invalid_scale: return "InvalidScale";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::syntax_error: return "SyntaxError";
    case errc::unknown_identifier: return "UnknownIdentifier";
    case errc::domain_error: return "DomainError";
    case errc::not_differentiable: return "NotDifferentiable";
    case errc::negative_point_with_fractional_alpha: return "NegativePointWithFractionalAlpha";
    case errc::nonpositive_point_with_fractional_alpha: return "NonpositivePointWithFractionalAlpha";
    case errc::zero_limit_undetermined: return "ZeroLimitUndetermined";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::not_monotone: return "NotMonotone";
    case errc::image_not_representable: return "ImageNotRepresentable";
    case errc::invalid_exponent: return "InvalidExponent";
    case errc::function_vanishes: return "FunctionVanishes";
    case errc::zero_weight_mass: return "ZeroWeightMass";
    case errc::shape_indeterminate: return "ShapeIndeterminate";
    case errc::negative_weight: return "NegativeWeight";
    }
    return "Unknown";
}

/// Single exception type for the library. `code()` identifies the failure;
/// `offset()` is the byte offset into the parsed text for syntax errors.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what, std::size_t offset = npos)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
        , offset_(offset)
    {}

    errc code() const noexcept { return code_; }
    std::size_t offset() const noexcept { return offset_; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    errc code_;
    std::size_t offset_;
};

} // namespace tsfrac
