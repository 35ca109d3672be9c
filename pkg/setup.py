from setuptools import setup

setup(
    name="obsforecast",
    version="0.1.0",
    description="Observability time-series forecasting model and benchmark protocol",
    python_requires=">=3.10",
    packages=["backbone", "causalScaler", "cli", "dataExchange", "engine", "error", "mathTools", "numKit", "obsBench", "seriesData", "smm"],
    py_modules=["basicTyping", "defaultCONFIG"],
    install_requires=["numpy", "pandas", "scipy", "loguru", "pyyaml"],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["obsforecast = cli.main:main"]},
)
