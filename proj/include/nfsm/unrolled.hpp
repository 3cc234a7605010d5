#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nn.hpp"

namespace nfsm
{

struct UnrolledConfig
{
  /// Number of input symbols T; one transition module per symbol.
  std::size_t length = 0;
  std::size_t alphabet_size = 2;
  /// Width of the carried state vector (the DFA state count for one-hot carriers).
  std::size_t state_dim = 2;
  /// Hidden width of every transition module.
  std::size_t width = 32;
  /// Index of the constant initial state vector e_{q0}.
  std::size_t initial_state = 0;
  /// Layers applied to the final state, e.g. {1} for an acceptance readout.
  std::vector<std::size_t> head_dims;
  std::vector<Activation> head_activations;
};

/*! \brief Trainable DFA-unrolled network.

  The carried state starts at the constant one-hot vector e_{q0}. Step t
  feeds [h_{t-1}; u_t] through its own two-layer module
  (ReLU hidden layer of `width` units, linear output of `state_dim` units).
  Head layers map h_T to the output. Modules do not share weights.

  Parameter layout in `layers`: step 0 hidden, step 0 output, step 1 hidden,
  ..., then the head layers in order.
*/
class UnrolledModel
{
public:
  UnrolledConfig config;
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return config.length * config.alphabet_size; }
  std::size_t head_offset() const { return 2 * config.length; }
  Activation output_activation() const { return layers.back().activation; }

  std::size_t parameter_count() const
  {
    std::size_t c = 0;
    for ( const auto& l : layers )
      c += static_cast<std::size_t>( l.weights.size() + l.bias.size() );
    return c;
  }

  /// Final carried state h_T for every column of `x`.
  Eigen::MatrixXd final_states( const Eigen::MatrixXd& x, Tape* tape = nullptr ) const
  {
    check_input( x );
    const auto n = static_cast<Eigen::Index>( config.state_dim );
    const auto k = static_cast<Eigen::Index>( config.alphabet_size );
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero( n, x.cols() );
    h.row( static_cast<Eigen::Index>( config.initial_state ) ).setOnes();
    for ( std::size_t t = 0; t < config.length; ++t )
    {
      Eigen::MatrixXd in( n + k, x.cols() );
      in.topRows( n ) = h;
      in.bottomRows( k ) = x.middleRows( static_cast<Eigen::Index>( t ) * k, k );
      const auto& hidden = layers[2 * t];
      const auto& out = layers[2 * t + 1];
      Eigen::MatrixXd z1 = hidden.pre_activation( in );
      Eigen::MatrixXd a1 = detail::activate( z1, hidden.activation, {} );
      Eigen::MatrixXd z2 = out.pre_activation( a1 );
      Eigen::MatrixXd a2 = detail::activate( z2, out.activation, {} );
      if ( tape )
      {
        tape->record( std::move( in ), std::move( z1 ), a1 );
        tape->record( std::move( a1 ), std::move( z2 ), a2 );
      }
      h = std::move( a2 );
    }
    return h;
  }

  /// Output of head layer `head_layer` (0-based); the last head layer gives the model output.
  Eigen::MatrixXd head_output( const Eigen::MatrixXd& x, std::size_t head_layer, Tape* tape = nullptr ) const
  {
    if ( head_offset() + head_layer >= layers.size() )
      throw std::domain_error( "unrolled model: head layer out of range" );
    Eigen::MatrixXd a = final_states( x, tape );
    for ( std::size_t i = head_offset(); i <= head_offset() + head_layer; ++i )
    {
      Eigen::MatrixXd z = layers[i].pre_activation( a );
      Eigen::MatrixXd next = detail::activate( z, layers[i].activation, {} );
      if ( tape )
        tape->record( std::move( a ), std::move( z ), next );
      a = std::move( next );
    }
    return a;
  }

  Eigen::MatrixXd forward_batch( const Eigen::MatrixXd& x, Tape* tape = nullptr ) const
  {
    return head_output( x, layers.size() - head_offset() - 1, tape );
  }

  Eigen::VectorXd forward( const Eigen::VectorXd& x ) const { return forward_batch( x ); }

  Gradients backward( const Tape& tape, Eigen::MatrixXd d_pre ) const
  {
    Gradients g = zero_gradients( layers );
    const auto n = static_cast<Eigen::Index>( config.state_dim );
    // Tape entries line up one-to-one with `layers`.
    for ( std::size_t i = layers.size(); i-- > 0; )
    {
      g[i].weights = d_pre * tape.inputs[i].transpose();
      g[i].bias = d_pre.rowwise().sum();
      if ( i == 0 )
        break;
      Eigen::MatrixXd d_in = layers[i].weights.transpose() * d_pre;
      const bool step_hidden = i < head_offset() && i % 2 == 0;
      if ( step_hidden )
        d_in = d_in.topRows( n ).eval(); // drop the symbol block, keep d h_{t-1}
      d_pre = d_in.cwiseProduct( detail::activation_slope( tape.pre[i - 1], tape.out[i - 1], layers[i - 1].activation ) );
    }
    return g;
  }

private:
  void check_input( const Eigen::MatrixXd& x ) const
  {
    if ( static_cast<std::size_t>( x.rows() ) != input_dim() )
      throw std::domain_error( "unrolled model: input dim " + std::to_string( x.rows() ) + " differs from T*k = " +
                               std::to_string( input_dim() ) );
  }
};

inline UnrolledModel init_unrolled( const UnrolledConfig& config, std::uint64_t seed )
{
  if ( config.head_dims.empty() || config.head_dims.size() != config.head_activations.size() )
    throw std::domain_error( "init_unrolled: need at least one head layer and one activation per head layer" );
  if ( config.state_dim == 0 || config.alphabet_size == 0 || config.width == 0 )
    throw std::domain_error( "init_unrolled: zero-sized dimension" );
  if ( config.initial_state >= config.state_dim )
    throw std::domain_error( "init_unrolled: initial state out of range" );
  std::mt19937_64 rng( seed );
  UnrolledModel model{ config, {} };
  for ( std::size_t t = 0; t < config.length; ++t )
  {
    model.layers.push_back( init_dense( config.state_dim + config.alphabet_size, config.width, Activation::relu, rng ) );
    model.layers.push_back( init_dense( config.width, config.state_dim, Activation::identity, rng ) );
  }
  std::size_t in = config.state_dim;
  for ( std::size_t i = 0; i < config.head_dims.size(); ++i )
  {
    model.layers.push_back( init_dense( in, config.head_dims[i], config.head_activations[i], rng ) );
    in = config.head_dims[i];
  }
  return model;
}

} // namespace nfsm
