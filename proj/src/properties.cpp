// Placeholder translation unit; implementation lands with its module.
namespace toricgw {}
