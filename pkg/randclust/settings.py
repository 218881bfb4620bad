"""
Django settings for randclust project.
Co-clustering espectral aleatorizado de redes dirigidas.
"""

from pathlib import Path

import environ

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env(
    RANDCLUST_DEBUG=(bool, True),
    RANDCLUST_DENSE_GUARD=(int, 20000),
    RANDCLUST_THREADS=(int, 1),
    RANDCLUST_LOG_LEVEL=(str, 'INFO'),
)
environ.Env.read_env(BASE_DIR / '.env', overwrite=False)

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = env('RANDCLUST_SECRET_KEY', default='django-insecure-randclust-desk-scale-only')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = env('RANDCLUST_DEBUG')

ALLOWED_HOSTS = env.list('RANDCLUST_ALLOWED_HOSTS', default=['*'])


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',

    # Third party apps
    'django_bootstrap5',
    'django_filters',
    'django_tables2',

    # Local apps
    'core.apps.CoreConfig',
    'graph.apps.GraphConfig',
    'blockmodels.apps.BlockmodelsConfig',
    'randsvd.apps.RandsvdConfig',
    'cluster.apps.ClusterConfig',
    'metrics.apps.MetricsConfig',
    'simulations.apps.SimulationsConfig',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'randclust.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [BASE_DIR / 'templates'],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'randclust.wsgi.application'


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': env.db('RANDCLUST_DATABASE_URL', default=f'sqlite:///{BASE_DIR / "db.sqlite3"}'),
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'es-ar'

TIME_ZONE = 'America/Argentina/Buenos_Aires'

USE_I18N = True

USE_TZ = True


# Static files (CSS, JavaScript, Images)
# https://docs.djangoproject.com/en/5.2/howto/static-files/

STATIC_URL = 'static/'
STATIC_ROOT = BASE_DIR / 'staticfiles'

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Logging
LOG_LEVEL = env('RANDCLUST_LOG_LEVEL')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ['core', 'graph', 'blockmodels', 'randsvd', 'cluster', 'metrics', 'simulations']
    },
}

# Django Tables2
DJANGO_TABLES2_TEMPLATE = 'django_tables2/bootstrap5.html'

# Co-clustering
# Límite de nodos para densificar P, Ã o el grafo (métricas y oráculos).
RANDCLUST_DENSE_GUARD = env('RANDCLUST_DENSE_GUARD')
# Hilos para réplicas concurrentes en `simulate` (--threads lo sobrescribe).
RANDCLUST_THREADS = env('RANDCLUST_THREADS')
