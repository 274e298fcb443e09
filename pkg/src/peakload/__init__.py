"""Daily peak-load forecasting: SARIMAX, NARX-MLP, SVR, LSTM and SARIMAX hybrids.

Submodules
----------
series      dated series, differencing, splits and scaling
features    weather and calendar regressors, correlation screening
sarimax     CSS estimation, order search and dynamic forecasts
neural      MLP and LSTM networks with Adam training
svr         epsilon-SVR solved by SMO
models      window forecasters shared by the single and hybrid models
hybrid      SARIMAX plus residual-model composites
evaluation  metrics, stratified k-fold, grid search, benchmark report
synth       synthetic load/weather generator
io, config, cli   files, run configuration and command line
"""

__version__ = "0.1.0"
