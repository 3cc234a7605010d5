#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nfsm
{

/*! Activation applied after the affine map of a layer.

  `step` fires when the pre-activation reaches the unit's threshold
  (z >= theta); `step_strict` fires only above it (z > theta) and is used by
  the acceptor readout.
*/
enum class Activation
{
  identity,
  relu,
  sigmoid,
  step,
  step_strict
};

inline std::string_view to_string( Activation a )
{
  switch ( a )
  {
  case Activation::identity: return "identity";
  case Activation::relu: return "relu";
  case Activation::sigmoid: return "sigmoid";
  case Activation::step: return "step";
  case Activation::step_strict: return "step_strict";
  }
  return "?";
}

inline std::optional<Activation> parse_activation( std::string_view s )
{
  for ( auto a : { Activation::identity, Activation::relu, Activation::sigmoid, Activation::step,
                   Activation::step_strict } )
    if ( to_string( a ) == s )
      return a;
  return std::nullopt;
}

inline bool is_step( Activation a ) { return a == Activation::step || a == Activation::step_strict; }

inline double sigmoid( double z )
{
  if ( z >= 0 )
    return 1.0 / ( 1.0 + std::exp( -z ) );
  const double e = std::exp( z );
  return e / ( 1.0 + e );
}

/// A dense layer of a compiled network; rows of `weights` are output units.
struct LayerSpec
{
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
  Activation activation = Activation::identity;
  /// Per-unit thresholds; only meaningful (and only non-empty) for step activations.
  Eigen::VectorXd thresholds;

  std::size_t input_dim() const { return static_cast<std::size_t>( weights.cols() ); }
  std::size_t output_dim() const { return static_cast<std::size_t>( weights.rows() ); }
  std::size_t parameter_count() const { return static_cast<std::size_t>( weights.size() + bias.size() ); }
};

/// Where a compiled network came from.
struct NetworkMetadata
{
  std::string construction;
  std::uint64_t dfa_hash = 0;
  /// Input length T for constructions over whole strings.
  std::optional<std::size_t> length;
  std::optional<std::uint64_t> seed;

  friend bool operator==( const NetworkMetadata&, const NetworkMetadata& ) = default;
};

struct NetworkSpec
{
  std::vector<LayerSpec> layers;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  NetworkMetadata metadata;

  std::size_t depth() const { return layers.size(); }

  std::vector<std::size_t> widths() const
  {
    std::vector<std::size_t> w;
    for ( const auto& l : layers )
      w.push_back( l.output_dim() );
    return w;
  }

  std::size_t parameter_count() const
  {
    std::size_t c = 0;
    for ( const auto& l : layers )
      c += l.parameter_count();
    return c;
  }

  /// Throws std::domain_error if layer shapes do not chain.
  void validate() const
  {
    if ( layers.empty() )
      throw std::domain_error( "network: no layers" );
    std::size_t expected = input_dim;
    for ( std::size_t i = 0; i < layers.size(); ++i )
    {
      const auto& l = layers[i];
      const auto where = "network layer " + std::to_string( i ) + ": ";
      if ( l.input_dim() != expected )
        throw std::domain_error( where + "input dim " + std::to_string( l.input_dim() ) + " does not chain (expected " +
                                 std::to_string( expected ) + ")" );
      if ( static_cast<std::size_t>( l.bias.size() ) != l.output_dim() )
        throw std::domain_error( where + "bias length differs from weight row count" );
      if ( is_step( l.activation ) )
      {
        if ( static_cast<std::size_t>( l.thresholds.size() ) != l.output_dim() )
          throw std::domain_error( where + "step layer needs one threshold per unit" );
      }
      else if ( l.thresholds.size() != 0 )
        throw std::domain_error( where + "thresholds given for a non-step layer" );
      expected = l.output_dim();
    }
    if ( expected != output_dim )
      throw std::domain_error( "network: last layer width " + std::to_string( expected ) +
                               " differs from declared output dim " + std::to_string( output_dim ) );
  }
};

} // namespace nfsm
