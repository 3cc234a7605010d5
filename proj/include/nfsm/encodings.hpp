#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "automata.hpp"

namespace nfsm
{

inline Eigen::VectorXd one_hot( std::size_t index, std::size_t dim )
{
  if ( index >= dim )
    throw std::domain_error( "one_hot: index " + std::to_string( index ) + " out of range for dim " +
                             std::to_string( dim ) );
  Eigen::VectorXd v = Eigen::VectorXd::Zero( static_cast<Eigen::Index>( dim ) );
  v[static_cast<Eigen::Index>( index )] = 1.0;
  return v;
}

/// Number of bits of the binary state code; one bit minimum so a single-state automaton still has a wire.
inline std::size_t binary_width( std::size_t state_count )
{
  if ( state_count == 0 )
    throw std::domain_error( "binary_width: state count must be positive" );
  std::size_t bits = 0;
  while ( ( std::size_t{ 1 } << bits ) < state_count )
    ++bits;
  return bits == 0 ? 1 : bits;
}

/// Little-endian base-2 code of `index` padded to `bits` entries, each 0.0 or 1.0.
inline Eigen::VectorXd binary_code( std::size_t index, std::size_t bits )
{
  if ( bits == 0 )
    throw std::domain_error( "binary_code: bit count must be positive" );
  if ( bits < 64 && index >= ( std::size_t{ 1 } << bits ) )
    throw std::domain_error( "binary_code: " + std::to_string( index ) + " does not fit in " +
                             std::to_string( bits ) + " bits" );
  Eigen::VectorXd v( static_cast<Eigen::Index>( bits ) );
  for ( std::size_t b = 0; b < bits; ++b )
    v[static_cast<Eigen::Index>( b )] = ( b < 64 && ( ( index >> b ) & 1u ) ) ? 1.0 : 0.0;
  return v;
}

/// Inverse of binary_code; entries are compared against 0.5.
inline std::size_t decode_binary( const Eigen::VectorXd& bits )
{
  std::size_t index = 0;
  for ( Eigen::Index b = 0; b < bits.size(); ++b )
    if ( bits[b] > 0.5 )
      index |= std::size_t{ 1 } << b;
  return index;
}

enum class EncodingKind
{
  one_hot,
  binary
};

struct StateEncoding
{
  EncodingKind kind;
  std::size_t dim;
  std::vector<Eigen::VectorXd> codes;

  const Eigen::VectorXd& code( state_index q ) const
  {
    if ( q >= codes.size() )
      throw std::domain_error( "state encoding: state " + std::to_string( q ) + " out of range" );
    return codes[q];
  }
};

inline StateEncoding make_state_encoding( EncodingKind kind, std::size_t state_count )
{
  StateEncoding enc{ kind, 0, {} };
  enc.dim = kind == EncodingKind::one_hot ? state_count : binary_width( state_count );
  if ( enc.dim == 0 )
    throw std::domain_error( "state encoding: state count must be positive" );
  for ( state_index q = 0; q < state_count; ++q )
    enc.codes.push_back( kind == EncodingKind::one_hot ? one_hot( q, enc.dim ) : binary_code( q, enc.dim ) );
  return enc;
}

/// Concatenated one-hot symbol blocks; `data` has length * alphabet_size entries.
struct EncodedString
{
  Eigen::VectorXd data;
  std::size_t length = 0;
  std::size_t alphabet_size = 0;
};

inline EncodedString encode_string( const SymbolString& x, std::size_t k )
{
  if ( k == 0 )
    throw std::domain_error( "encode_string: alphabet size must be positive" );
  EncodedString out{ Eigen::VectorXd::Zero( static_cast<Eigen::Index>( x.size() * k ) ), x.size(), k };
  for ( std::size_t t = 0; t < x.size(); ++t )
  {
    if ( x[t] >= k )
      throw std::domain_error( "encode_string: symbol " + std::to_string( x[t] ) + " at position " +
                               std::to_string( t ) + " out of range for k = " + std::to_string( k ) );
    out.data[static_cast<Eigen::Index>( t * k + x[t] )] = 1.0;
  }
  return out;
}

/// Argmax of every k-block (first maximum wins).
inline SymbolString decode_string( const EncodedString& e )
{
  SymbolString x( e.length );
  const auto k = static_cast<Eigen::Index>( e.alphabet_size );
  for ( std::size_t t = 0; t < e.length; ++t )
  {
    Eigen::Index best;
    e.data.segment( static_cast<Eigen::Index>( t ) * k, k ).maxCoeff( &best );
    x[t] = static_cast<symbol_index>( best );
  }
  return x;
}

} // namespace nfsm
