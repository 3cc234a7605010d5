#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "network.hpp"

namespace nfsm
{

namespace detail
{

inline Eigen::MatrixXd activate( const Eigen::MatrixXd& pre, Activation act, const Eigen::VectorXd& thresholds )
{
  switch ( act )
  {
  case Activation::identity:
    return pre;
  case Activation::relu:
    return pre.cwiseMax( 0.0 );
  case Activation::sigmoid:
    return pre.unaryExpr( []( double z ) { return sigmoid( z ); } );
  case Activation::step:
  case Activation::step_strict:
  {
    Eigen::MatrixXd out( pre.rows(), pre.cols() );
    const bool strict = act == Activation::step_strict;
    for ( Eigen::Index c = 0; c < pre.cols(); ++c )
      for ( Eigen::Index r = 0; r < pre.rows(); ++r )
      {
        const double z = pre( r, c ), theta = thresholds[r];
        out( r, c ) = ( strict ? z > theta : z >= theta ) ? 1.0 : 0.0;
      }
    return out;
  }
  }
  throw std::logic_error( "unknown activation" );
}

/// d(activation)/d(pre-activation), given both sides of the activation.
inline Eigen::MatrixXd activation_slope( const Eigen::MatrixXd& pre, const Eigen::MatrixXd& out, Activation act )
{
  switch ( act )
  {
  case Activation::identity:
    return Eigen::MatrixXd::Ones( pre.rows(), pre.cols() );
  case Activation::relu:
    return ( pre.array() > 0.0 ).cast<double>().matrix();
  case Activation::sigmoid:
    return ( out.array() * ( 1.0 - out.array() ) ).matrix();
  default:
    throw std::domain_error( "activation " + std::string( to_string( act ) ) + " is not differentiable" );
  }
}

} // namespace detail

/// Evaluates a compiled network on a batch; columns are samples.
inline Eigen::MatrixXd forward_batch( const NetworkSpec& net, const Eigen::MatrixXd& inputs )
{
  if ( static_cast<std::size_t>( inputs.rows() ) != net.input_dim )
    throw std::domain_error( "forward: input dim " + std::to_string( inputs.rows() ) + " differs from network input dim " +
                             std::to_string( net.input_dim ) );
  Eigen::MatrixXd a = inputs;
  for ( const auto& layer : net.layers )
  {
    if ( static_cast<Eigen::Index>( layer.input_dim() ) != a.rows() )
      throw std::domain_error( "forward: layer dimensions do not chain" );
    Eigen::MatrixXd pre = layer.weights * a;
    pre.colwise() += layer.bias;
    a = detail::activate( pre, layer.activation, layer.thresholds );
  }
  return a;
}

inline Eigen::VectorXd forward( const NetworkSpec& net, const Eigen::VectorXd& input )
{
  return forward_batch( net, input );
}

// ---------------------------------------------------------------------------
// Trainable models

struct DenseLayer
{
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
  Activation activation = Activation::identity;

  Eigen::MatrixXd pre_activation( const Eigen::MatrixXd& x ) const
  {
    Eigen::MatrixXd z = weights * x;
    z.colwise() += bias;
    return z;
  }

  friend bool operator==( const DenseLayer& a, const DenseLayer& b )
  {
    return a.activation == b.activation && a.weights == b.weights && a.bias == b.bias;
  }
};

struct LayerGradient
{
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

using Gradients = std::vector<LayerGradient>;

/// Per-application record of a forward pass, consumed by backward().
struct Tape
{
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;
  std::vector<Eigen::MatrixXd> out;

  void record( Eigen::MatrixXd x, Eigen::MatrixXd z, Eigen::MatrixXd a )
  {
    inputs.push_back( std::move( x ) );
    pre.push_back( std::move( z ) );
    out.push_back( std::move( a ) );
  }
};

inline Gradients zero_gradients( const std::vector<DenseLayer>& layers )
{
  Gradients g;
  for ( const auto& l : layers )
    g.push_back( { Eigen::MatrixXd::Zero( l.weights.rows(), l.weights.cols() ), Eigen::VectorXd::Zero( l.bias.size() ) } );
  return g;
}

inline DenseLayer init_dense( std::size_t in, std::size_t out, Activation act, std::mt19937_64& rng )
{
  if ( is_step( act ) )
    throw std::domain_error( "trainable layers cannot use step activations" );
  const double bound = in == 0 ? 0.0 : std::sqrt( 1.0 / static_cast<double>( in ) );
  std::uniform_real_distribution<double> dist( -bound, bound );
  DenseLayer layer{ Eigen::MatrixXd( out, in ), Eigen::VectorXd::Zero( static_cast<Eigen::Index>( out ) ), act };
  for ( Eigen::Index r = 0; r < layer.weights.rows(); ++r )
    for ( Eigen::Index c = 0; c < layer.weights.cols(); ++c )
      layer.weights( r, c ) = bound == 0.0 ? 0.0 : dist( rng );
  return layer;
}

/// Plain multilayer perceptron with dense layers applied in order.
class TrainableMlp
{
public:
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return static_cast<std::size_t>( layers.front().weights.cols() ); }
  std::size_t output_dim() const { return static_cast<std::size_t>( layers.back().weights.rows() ); }
  Activation output_activation() const { return layers.back().activation; }

  std::size_t parameter_count() const
  {
    std::size_t c = 0;
    for ( const auto& l : layers )
      c += static_cast<std::size_t>( l.weights.size() + l.bias.size() );
    return c;
  }

  Eigen::MatrixXd forward_batch( const Eigen::MatrixXd& x, Tape* tape = nullptr ) const
  {
    if ( static_cast<std::size_t>( x.rows() ) != input_dim() )
      throw std::domain_error( "mlp: input dim " + std::to_string( x.rows() ) + " differs from " +
                               std::to_string( input_dim() ) );
    Eigen::MatrixXd a = x;
    for ( const auto& l : layers )
    {
      Eigen::MatrixXd z = l.pre_activation( a );
      Eigen::MatrixXd next = detail::activate( z, l.activation, {} );
      if ( tape )
        tape->record( std::move( a ), std::move( z ), next );
      a = std::move( next );
    }
    return a;
  }

  Eigen::VectorXd forward( const Eigen::VectorXd& x ) const { return forward_batch( x ); }

  /// Backpropagates the gradient of the loss with respect to the last pre-activation.
  Gradients backward( const Tape& tape, Eigen::MatrixXd d_pre ) const
  {
    Gradients g = zero_gradients( layers );
    for ( std::size_t i = layers.size(); i-- > 0; )
    {
      g[i].weights = d_pre * tape.inputs[i].transpose();
      g[i].bias = d_pre.rowwise().sum();
      if ( i == 0 )
        break;
      Eigen::MatrixXd d_out = layers[i].weights.transpose() * d_pre;
      d_pre = d_out.cwiseProduct(
          detail::activation_slope( tape.pre[i - 1], tape.out[i - 1], layers[i - 1].activation ) );
    }
    return g;
  }

  friend bool operator==( const TrainableMlp&, const TrainableMlp& ) = default;
};

/*! \brief Builds an MLP with seeded scaled-uniform weights and zero biases.

  `dims` lists the layer widths including the input, so `{4, 32, 2}` is one
  hidden layer; `activations` has one entry per weight layer.
*/
inline TrainableMlp init_mlp( const std::vector<std::size_t>& dims, const std::vector<Activation>& activations,
                              std::uint64_t seed )
{
  if ( dims.size() < 2 )
    throw std::domain_error( "init_mlp: need at least an input and an output dimension" );
  if ( activations.size() != dims.size() - 1 )
    throw std::domain_error( "init_mlp: need one activation per layer" );
  for ( auto d : dims )
    if ( d == 0 )
      throw std::domain_error( "init_mlp: zero-width layer" );
  std::mt19937_64 rng( seed );
  TrainableMlp mlp;
  for ( std::size_t i = 0; i + 1 < dims.size(); ++i )
    mlp.layers.push_back( init_dense( dims[i], dims[i + 1], activations[i], rng ) );
  return mlp;
}

// ---------------------------------------------------------------------------
// Losses

enum class Loss
{
  /// Binary cross-entropy on a sigmoid output, averaged over all output entries.
  bce,
  /// Squared error averaged over all output entries.
  mse,
  /// Softmax cross-entropy on identity (logit) outputs, averaged over samples.
  softmax_ce
};

inline std::string_view to_string( Loss l )
{
  switch ( l )
  {
  case Loss::bce: return "bce";
  case Loss::mse: return "mse";
  case Loss::softmax_ce: return "softmax_ce";
  }
  return "?";
}

struct LossValue
{
  double loss = 0.0;
  /// Gradient with respect to the pre-activation of the output layer.
  Eigen::MatrixXd d_pre;
};

inline LossValue evaluate_loss( Loss loss, Activation output_activation, const Eigen::MatrixXd& pre,
                                const Eigen::MatrixXd& out, const Eigen::MatrixXd& labels )
{
  if ( labels.rows() != out.rows() || labels.cols() != out.cols() )
    throw std::domain_error( "loss: labels are " + std::to_string( labels.rows() ) + "x" +
                             std::to_string( labels.cols() ) + " but outputs are " + std::to_string( out.rows() ) +
                             "x" + std::to_string( out.cols() ) );
  if ( out.cols() == 0 )
    throw std::domain_error( "loss: empty batch" );
  LossValue v;
  const double entries = static_cast<double>( out.size() );
  const double batch = static_cast<double>( out.cols() );
  switch ( loss )
  {
  case Loss::bce:
  {
    if ( output_activation != Activation::sigmoid )
      throw std::domain_error( "bce loss needs a sigmoid output layer" );
    double total = 0.0;
    for ( Eigen::Index i = 0; i < pre.size(); ++i )
    {
      const double z = pre.data()[i], y = labels.data()[i];
      total += std::max( z, 0.0 ) - z * y + std::log1p( std::exp( -std::abs( z ) ) );
    }
    v.loss = total / entries;
    v.d_pre = ( out - labels ) / entries;
    break;
  }
  case Loss::mse:
  {
    const Eigen::MatrixXd diff = out - labels;
    v.loss = diff.squaredNorm() / entries;
    v.d_pre = ( 2.0 / entries ) * diff.cwiseProduct( detail::activation_slope( pre, out, output_activation ) );
    break;
  }
  case Loss::softmax_ce:
  {
    if ( output_activation != Activation::identity )
      throw std::domain_error( "softmax cross-entropy needs identity (logit) outputs" );
    v.d_pre.resize( out.rows(), out.cols() );
    double total = 0.0;
    for ( Eigen::Index c = 0; c < out.cols(); ++c )
    {
      const double m = out.col( c ).maxCoeff();
      const Eigen::VectorXd e = ( out.col( c ).array() - m ).exp();
      const double s = e.sum();
      total += -( labels.col( c ).array() * ( out.col( c ).array() - m - std::log( s ) ) ).sum();
      v.d_pre.col( c ) = ( e / s - labels.col( c ) ) / batch;
    }
    v.loss = total / batch;
    break;
  }
  }
  return v;
}

struct LossAndGradients
{
  double loss = 0.0;
  Gradients gradients;
};

/// Mean loss over the batch (columns of `inputs`) and its exact reverse-mode gradient.
template<typename Model>
LossAndGradients loss_and_gradients( const Model& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& labels,
                                     Loss loss )
{
  if ( inputs.cols() == 0 )
    throw std::domain_error( "loss_and_gradients: empty batch" );
  Tape tape;
  const Eigen::MatrixXd out = model.forward_batch( inputs, &tape );
  auto v = evaluate_loss( loss, model.output_activation(), tape.pre.back(), out, labels );
  return { v.loss, model.backward( tape, std::move( v.d_pre ) ) };
}

// ---------------------------------------------------------------------------
// Optimizer

struct AdamConfig
{
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState
{
public:
  AdamState( const std::vector<DenseLayer>& layers, AdamConfig config )
      : config_( config ), first_( zero_gradients( layers ) ), second_( zero_gradients( layers ) )
  {
  }

  std::size_t step_count() const { return steps_; }
  const AdamConfig& config() const { return config_; }

  void apply( std::vector<DenseLayer>& layers, const Gradients& grads )
  {
    if ( grads.size() != layers.size() || first_.size() != layers.size() )
      throw std::domain_error( "adam: gradient shape differs from parameter shape" );
    ++steps_;
    const double c1 = 1.0 - std::pow( config_.beta1, static_cast<double>( steps_ ) );
    const double c2 = 1.0 - std::pow( config_.beta2, static_cast<double>( steps_ ) );
    for ( std::size_t i = 0; i < layers.size(); ++i )
    {
      update( layers[i].weights, first_[i].weights, second_[i].weights, grads[i].weights, c1, c2 );
      update( layers[i].bias, first_[i].bias, second_[i].bias, grads[i].bias, c1, c2 );
    }
  }

private:
  template<typename Param>
  void update( Param& p, Param& m, Param& v, const Param& g, double c1, double c2 ) const
  {
    if ( p.size() != g.size() )
      throw std::domain_error( "adam: gradient shape differs from parameter shape" );
    m = config_.beta1 * m + ( 1.0 - config_.beta1 ) * g;
    v = config_.beta2 * v + ( 1.0 - config_.beta2 ) * g.cwiseProduct( g );
    p.array() -= config_.learning_rate * ( m.array() / c1 ) / ( ( v.array() / c2 ).sqrt() + config_.epsilon );
  }

  AdamConfig config_;
  Gradients first_;
  Gradients second_;
  std::size_t steps_ = 0;
};

struct TrainConfig
{
  std::size_t epochs = 200;
  double learning_rate = 0.01;
  Loss loss = Loss::bce;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Called after every epoch with (epoch index, loss before the update).
  std::function<void( std::size_t, double )> progress;
};

template<typename Model>
struct TrainResult
{
  Model model;
  std::vector<double> loss_trace;
};

/// Full-batch Adam: one gradient step per epoch over the whole dataset.
template<typename Model>
TrainResult<Model> train( Model model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& labels,
                          const TrainConfig& config )
{
  if ( inputs.cols() == 0 )
    throw std::domain_error( "train: empty dataset" );
  AdamState adam( model.layers, { config.learning_rate, config.beta1, config.beta2, config.adam_epsilon } );
  std::vector<double> trace;
  trace.reserve( config.epochs );
  for ( std::size_t epoch = 0; epoch < config.epochs; ++epoch )
  {
    auto lg = loss_and_gradients( model, inputs, labels, config.loss );
    adam.apply( model.layers, lg.gradients );
    trace.push_back( lg.loss );
    if ( config.progress )
      config.progress( epoch, lg.loss );
  }
  return { std::move( model ), std::move( trace ) };
}

/// Rounds sigmoid outputs to bits; exactly 0.5 rounds up.
template<typename Model>
Eigen::VectorXd binarized_forward( const Model& model, const Eigen::VectorXd& input )
{
  if ( model.output_activation() != Activation::sigmoid )
    throw std::domain_error( "binarized_forward needs a sigmoid output layer" );
  Eigen::VectorXd out = model.forward_batch( input );
  return out.unaryExpr( []( double v ) { return std::round( v ); } );
}

} // namespace nfsm
